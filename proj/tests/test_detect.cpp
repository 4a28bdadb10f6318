#include <doctest.h>

#include "featrend/feature.hpp"
#include "featrend/syntax.hpp"

#include <map>
#include <string>

using namespace featrend;

namespace {

FileFeatureReport detect_src(const std::string& src) {
    return detect(parse_source(src, "test.kt"));
}

std::int64_t count_of(const FileFeatureReport& rep, FeatureKind kind) {
    std::int64_t n = 0;
    for (const auto& inst : rep.instances)
        if (inst.kind == kind)
            ++n;
    return n;
}

} // namespace

TEST_CASE("type inference on initialized declaration without annotation") {
    auto rep = detect_src("var a = 10");
    CHECK(count_of(rep, FeatureKind::TypeInference) == 1);
    CHECK(rep.denominators.variable_declarations == 1);
}

TEST_CASE("annotated declaration is not inferred") {
    auto rep = detect_src("val s: String = \"x\"");
    CHECK(count_of(rep, FeatureKind::TypeInference) == 0);
    CHECK(rep.denominators.strings == 1);
    CHECK(rep.denominators.variable_declarations == 1);
}

TEST_CASE("constructor default value counts once per declaration") {
    auto rep = detect_src("class C(val p: Int = 0)");
    CHECK(count_of(rep, FeatureKind::FuncWithDefaultValue) == 1);
    CHECK(rep.denominators.classes == 1);
    CHECK(rep.denominators.constructors == 1);
    CHECK(rep.denominators.properties == 1);
}

TEST_CASE("safe and unsafe calls in one chain") {
    auto rep = detect_src("fun h(x: A?) { x?.f()!!.g() }");
    CHECK(count_of(rep, FeatureKind::SafeCall) == 1);
    CHECK(count_of(rep, FeatureKind::UnsafeCall) == 1);
    CHECK(rep.denominators.function_calls == 2);
}

TEST_CASE("lambdas and when expressions") {
    auto rep = detect_src(
        "fun f(x: Int) = when (x) { 0 -> {1} else -> 2 }\n"
        "val g = { y: Int -> y * 2 }\n");
    CHECK(count_of(rep, FeatureKind::WhenExpr) == 1);
    CHECK(count_of(rep, FeatureKind::Lambda) == 1);
}

TEST_CASE("modifier-driven kinds") {
    auto rep = detect_src(
        "inline fun i() {}\n"
        "operator fun Int.plus(o: C): C = C()\n"
        "infix fun Int.pow(o: Int) = 0\n"
        "tailrec fun t(n: Int): Int = if (n == 0) 0 else t(n - 1)\n"
        "data class D(val x: Int)\n"
        "sealed class S\n"
        "inline class W(val v: Int)\n");
    CHECK(count_of(rep, FeatureKind::InlineFunction) == 1);
    CHECK(count_of(rep, FeatureKind::OperatorOverloading) == 1);
    CHECK(count_of(rep, FeatureKind::InfixFunction) == 1);
    CHECK(count_of(rep, FeatureKind::TailrecFunction) == 1);
    CHECK(count_of(rep, FeatureKind::DataClass) == 1);
    CHECK(count_of(rep, FeatureKind::SealedClass) == 1);
    CHECK(count_of(rep, FeatureKind::InlineClass) == 1);
    CHECK(count_of(rep, FeatureKind::ExtensionFunction) == 2); // plus, pow
    CHECK(rep.denominators.classes == 3);
    CHECK(rep.denominators.named_functions == 4);
}

TEST_CASE("range expressions: .. and named infix") {
    auto rep = detect_src(
        "fun r(n: Int) {\n"
        "  for (i in 0..n) use(i)\n"
        "  for (i in n downTo 0) use(i)\n"
        "  for (i in 0 until n) use(i)\n"
        "  val p = a step b\n"
        "}\n");
    CHECK(count_of(rep, FeatureKind::RangeExpr) == 3); // step excluded by default
}

TEST_CASE("range infix set is configurable") {
    FeatureConfig cfg = FeatureConfig::defaults();
    cfg.range_infix_names.insert("step");
    auto rep = detect(parse_source("val p = a step b", "t.kt"), cfg);
    CHECK(count_of(rep, FeatureKind::RangeExpr) == 1);
}

TEST_CASE("string templates count once per literal") {
    auto rep = detect_src(
        "val a = \"plain\"\n"
        "val b = \"hi $name and ${f(x)}\"\n");
    CHECK(count_of(rep, FeatureKind::StringTemplate) == 1);
    CHECK(rep.denominators.strings == 2);
    CHECK(rep.denominators.function_calls == 1);
}

TEST_CASE("delegation split into super and property kinds") {
    auto rep = detect_src(
        "class A(impl: B) : B by impl\n"
        "class C { val heavy by lazy { make() } }\n");
    CHECK(count_of(rep, FeatureKind::SuperDelegation) == 1);
    CHECK(count_of(rep, FeatureKind::PropertyDelegation) == 1);
    CHECK(rep.denominators.inheritances == 1);
    CHECK(rep.denominators.properties == 2);
}

TEST_CASE("singleton and companion object") {
    auto rep = detect_src(
        "object Registry\n"
        "class C { companion object { } }\n"
        "val anon = object : Runnable { }\n");
    CHECK(count_of(rep, FeatureKind::Singleton) == 1);
    CHECK(count_of(rep, FeatureKind::CompanionObject) == 1);
    CHECK(rep.denominators.object_declarations == 3);
}

TEST_CASE("named arguments count once per call") {
    auto rep = detect_src("fun f() { g(x = 1, y = 2); h(3); }");
    CHECK(count_of(rep, FeatureKind::FuncCallWithNamedArg) == 1);
    CHECK(rep.denominators.function_calls == 2);
}

TEST_CASE("smart cast heuristic: guarded receiver use") {
    auto rep = detect_src(
        "fun f(x: Any, y: Any) {\n"
        "  if (x is String) {\n"
        "    use(x.length)\n"
        "  }\n"
        "  if (y is String) {\n"
        "    val z = y as String\n"
        "    use(z.length)\n"
        "  }\n"
        "  x.hashCode()\n"
        "}\n");
    CHECK(count_of(rep, FeatureKind::SmartCast) == 1);
}

TEST_CASE("smart cast from when subject branch") {
    auto rep = detect_src(
        "fun f(x: Any) = when (x) {\n"
        "  is String -> x.length\n"
        "  is Int -> x.toString().length\n"
        "  else -> 0\n"
        "}\n");
    CHECK(count_of(rep, FeatureKind::SmartCast) == 2);
}

TEST_CASE("coroutine keyword strategy") {
    auto rep = detect_src(
        "suspend fun work() { delay(100) }\n"
        "fun main() { runBlocking { launch { work() } } }\n");
    // suspend fun + delay + runBlocking + launch
    CHECK(count_of(rep, FeatureKind::Coroutine) == 4);
}

TEST_CASE("contract call inside function body") {
    auto rep = detect_src(
        "fun require(cond: Boolean) {\n"
        "  contract { returns() implies cond }\n"
        "}\n"
        "val notAContract = contract\n");
    CHECK(count_of(rep, FeatureKind::Contract) == 1);
}

TEST_CASE("destructuring declarations count components as variables") {
    auto rep = detect_src(
        "fun f(p: Pair<Int, Int>, m: Map<Int, Int>) {\n"
        "  val (a, b) = p\n"
        "  for ((k, v) in m) use(k, v)\n"
        "  m.forEach { (x, y) -> use(x, y) }\n"
        "}\n");
    CHECK(count_of(rep, FeatureKind::DestructuringDecl) == 3);
    CHECK(rep.denominators.variable_declarations == 6);
}

TEST_CASE("disabled kinds are not reported") {
    FeatureConfig cfg = FeatureConfig::defaults();
    cfg.enabled.erase(FeatureKind::Lambda);
    auto rep = detect(parse_source("val f = { x: Int -> x }", "t.kt"), cfg);
    CHECK(count_of(rep, FeatureKind::Lambda) == 0);
}

TEST_CASE("feature config file parsing") {
    FeatureConfig cfg = FeatureConfig::from_file_text(
        "# comment\n-SmartCast\ncoroutine:flow\nrange-infix:step\n",
        FeatureConfig::defaults());
    CHECK(!cfg.is_enabled(FeatureKind::SmartCast));
    CHECK(cfg.is_enabled(FeatureKind::Lambda));
    CHECK(cfg.coroutine_keywords.count("flow") == 1);
    CHECK(cfg.range_infix_names.count("step") == 1);
}

TEST_CASE("determinism: repeated detection is identical") {
    std::string src =
        "class A(val n: Int = 1) : B by impl {\n"
        "  companion object { val k = \"v $n\" }\n"
        "  fun f(x: Any) = when (x) { is String -> x.length; else -> 0 }\n"
        "}\n";
    auto a = detect_src(src);
    auto b = detect_src(src);
    REQUIRE(a.instances.size() == b.instances.size());
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
        CHECK(a.instances[i].kind == b.instances[i].kind);
        CHECK(a.instances[i].line == b.instances[i].line);
    }
    CHECK(a.denominators == b.denominators);
}

TEST_CASE("dominance: non-lloc denominators bound their features") {
    std::string src =
        "data class D(val x: Int = 0)\n"
        "sealed class S\n"
        "inline class I(val v: Int)\n"
        "object O\n"
        "class C : S() { companion object }\n"
        "inline fun f() {}\n"
        "operator fun D.plus(o: D) = o\n"
        "val t = \"a $x\"\n"
        "val u = g(n = 2)\n"
        "val (p, q) = r\n";
    auto rep = detect_src(src);
    auto counts = rep.counts_by_kind();
    auto getc = [&](FeatureKind k) { return counts.count(k) ? counts[k] : 0; };
    const auto& d = rep.denominators;
    CHECK(getc(FeatureKind::TypeInference) <= d.variable_declarations);
    CHECK(getc(FeatureKind::DataClass) <= d.classes);
    CHECK(getc(FeatureKind::SealedClass) <= d.classes);
    CHECK(getc(FeatureKind::InlineClass) <= d.classes);
    CHECK(getc(FeatureKind::InlineFunction) <= d.named_functions);
    CHECK(getc(FeatureKind::ExtensionFunction) <= d.named_functions);
    CHECK(getc(FeatureKind::OperatorOverloading) <= d.named_functions);
    CHECK(getc(FeatureKind::StringTemplate) <= d.strings);
    CHECK(getc(FeatureKind::FuncCallWithNamedArg) <= d.function_calls);
    CHECK(getc(FeatureKind::Singleton) + getc(FeatureKind::CompanionObject) <=
          d.object_declarations);
    CHECK(getc(FeatureKind::DestructuringDecl) <= d.variable_declarations);
    CHECK(getc(FeatureKind::SuperDelegation) <= d.inheritances);
    CHECK(getc(FeatureKind::PropertyDelegation) <= d.properties);
    CHECK(getc(FeatureKind::FuncWithDefaultValue) <=
          d.named_functions + d.constructors);
}

TEST_CASE("locality: detection distributes over concatenation") {
    std::string f1 = "class A { fun f() { g() } }\n";
    std::string f2 = "object B { val s = \"x $y\" }\n";
    auto ra = detect_src(f1);
    auto rb = detect_src(f2);
    auto rc = detect_src(f1 + f2);
    auto ca = ra.counts_by_kind();
    auto cb = rb.counts_by_kind();
    auto cc = rc.counts_by_kind();
    for (FeatureKind k : all_feature_kinds()) {
        std::int64_t lhs = (ca.count(k) ? ca[k] : 0) + (cb.count(k) ? cb[k] : 0);
        std::int64_t rhs = cc.count(k) ? cc[k] : 0;
        CHECK(lhs == rhs);
    }
    DenominatorCounts sum = ra.denominators;
    sum += rb.denominators;
    CHECK(sum == rc.denominators);
}
