#include <doctest.h>

#include "featrend/syntax.hpp"

#include <functional>
#include <string>
#include <vector>

using namespace featrend;

namespace {

// first node of a kind, depth-first
const SyntaxNode* find_kind(const SyntaxNode& root, NodeKind kind) {
    if (root.kind == kind)
        return &root;
    for (const auto& c : root.children)
        if (const SyntaxNode* hit = find_kind(c, kind))
            return hit;
    return nullptr;
}

int count_kind(const SyntaxNode& root, NodeKind kind) {
    int n = root.kind == kind ? 1 : 0;
    for (const auto& c : root.children)
        n += count_kind(c, kind);
    return n;
}

void for_each(const SyntaxNode& root, const std::function<void(const SyntaxNode&)>& fn) {
    fn(root);
    for (const auto& c : root.children)
        for_each(c, fn);
}

} // namespace

TEST_CASE("class with a member function") {
    SourceTree t = parse_source("class A { fun f() {} }");
    const SyntaxNode* cls = find_kind(t.root, NodeKind::ClassDecl);
    REQUIRE(cls != nullptr);
    CHECK(cls->name == "A");
    const SyntaxNode* fn = find_kind(*cls, NodeKind::FunctionDecl);
    REQUIRE(fn != nullptr);
    CHECK(fn->name == "f");
}

TEST_CASE("destructuring declaration has component names") {
    SourceTree t = parse_source("val (a, b) = p");
    const SyntaxNode* d = find_kind(t.root, NodeKind::DestructuringDecl);
    REQUIRE(d != nullptr);
    REQUIRE(d->components.size() == 2);
    CHECK(d->components[0] == "a");
    CHECK(d->components[1] == "b");
}

TEST_CASE("extension function records its receiver type") {
    SourceTree t = parse_source("fun Int.twice() = this * 2");
    const SyntaxNode* fn = find_kind(t.root, NodeKind::FunctionDecl);
    REQUIRE(fn != nullptr);
    CHECK(fn->name == "twice");
    CHECK(fn->receiver_type == "Int");
    CHECK(fn->has_initializer);
}

TEST_CASE("generic receiver keeps full text") {
    SourceTree t = parse_source("fun List<Int>.sum(): Int = 0");
    const SyntaxNode* fn = find_kind(t.root, NodeKind::FunctionDecl);
    REQUIRE(fn != nullptr);
    CHECK(fn->name == "sum");
    CHECK(fn->receiver_type == "List<Int>");
}

TEST_CASE("modifiers become Modifier children and flags") {
    SourceTree t = parse_source("data class P(val x: Int)\nsealed class S\n");
    const SyntaxNode* cls = find_kind(t.root, NodeKind::ClassDecl);
    REQUIRE(cls != nullptr);
    CHECK(cls->has_modifier("data"));
    CHECK(find_kind(*cls, NodeKind::Modifier) != nullptr);
    CHECK(count_kind(t.root, NodeKind::ClassDecl) == 2);
}

TEST_CASE("primary constructor with property parameter") {
    SourceTree t = parse_source("class C(val p: Int = 0)");
    const SyntaxNode* ctor = find_kind(t.root, NodeKind::ConstructorDecl);
    REQUIRE(ctor != nullptr);
    CHECK(ctor->has_default);
    const SyntaxNode* prop = find_kind(*ctor, NodeKind::PropertyDecl);
    REQUIRE(prop != nullptr);
    CHECK(prop->name == "p");
    CHECK(prop->ctor_property);
    CHECK(prop->has_type_annotation);
}

TEST_CASE("secondary constructor") {
    SourceTree t = parse_source("class C { constructor(x: Int) : this() {} }");
    CHECK(count_kind(t.root, NodeKind::ConstructorDecl) == 1);
}

TEST_CASE("object declarations and companion objects") {
    SourceTree t = parse_source(
        "object Registry { }\n"
        "class C { companion object Factory { } }\n"
        "val listener = object : Runnable { }\n");
    CHECK(count_kind(t.root, NodeKind::ObjectDecl) == 2);
    CHECK(count_kind(t.root, NodeKind::CompanionObjectDecl) == 1);
    int anonymous = 0;
    for_each(t.root, [&](const SyntaxNode& n) {
        if (n.kind == NodeKind::ObjectDecl && n.anonymous)
            ++anonymous;
    });
    CHECK(anonymous == 1);
}

TEST_CASE("supertype entries with constructor call and delegation") {
    SourceTree t = parse_source("class A : B(1), C, D by impl { }");
    CHECK(count_kind(t.root, NodeKind::SuperTypeEntry) == 3);
    int delegated = 0;
    for_each(t.root, [&](const SyntaxNode& n) {
        if (n.kind == NodeKind::SuperTypeEntry && n.has_delegate)
            ++delegated;
    });
    CHECK(delegated == 1);
}

TEST_CASE("call chain with safe calls and unsafe postfix") {
    SourceTree t = parse_source("fun g(x: A?) { x?.f()!!.g() }");
    CHECK(count_kind(t.root, NodeKind::CallExpr) == 2);
    int safe = 0, unsafe = 0;
    for_each(t.root, [&](const SyntaxNode& n) {
        if (n.kind == NodeKind::BinaryOp && n.text == "?.")
            ++safe;
        if (n.kind == NodeKind::UnaryPostfixOp && n.text == "!!")
            ++unsafe;
    });
    CHECK(safe == 1);
    CHECK(unsafe == 1);
}

TEST_CASE("trailing lambda makes the call") {
    SourceTree t = parse_source("fun m(xs: List<Int>) { xs.forEach { println(it) } }");
    CHECK(count_kind(t.root, NodeKind::LambdaExpr) == 1);
    int calls = 0;
    std::vector<std::string> names;
    for_each(t.root, [&](const SyntaxNode& n) {
        if (n.kind == NodeKind::CallExpr) {
            ++calls;
            names.push_back(n.name);
        }
    });
    CHECK(calls == 2); // forEach + println
}

TEST_CASE("lambda on next line is not a trailing argument") {
    SourceTree t = parse_source("fun m() {\n  f()\n  { x: Int -> x }\n}");
    CHECK(count_kind(t.root, NodeKind::CallExpr) == 1);
    CHECK(count_kind(t.root, NodeKind::LambdaExpr) == 1);
}

TEST_CASE("lambda parameters with destructuring") {
    SourceTree t = parse_source("val f = { (a, b): Pair<Int, Int>, c: Int -> a + b + c }");
    const SyntaxNode* lam = find_kind(t.root, NodeKind::LambdaExpr);
    REQUIRE(lam != nullptr);
    const SyntaxNode* d = find_kind(*lam, NodeKind::DestructuringDecl);
    REQUIRE(d != nullptr);
    CHECK(d->components.size() == 2);
}

TEST_CASE("when expression with subject and is-entries") {
    SourceTree t = parse_source(
        "fun f(x: Any) = when (x) {\n"
        "  is String -> x.length\n"
        "  else -> 0\n"
        "}\n");
    const SyntaxNode* w = find_kind(t.root, NodeKind::WhenExpr);
    REQUIRE(w != nullptr);
    CHECK(w->name == "x");
    int is_entries = 0;
    for_each(*w, [&](const SyntaxNode& n) {
        if (n.kind == NodeKind::Other && n.text == "when-entry" && n.is_check)
            ++is_entries;
    });
    CHECK(is_entries == 1);
}

TEST_CASE("string template entries parse inner expressions") {
    SourceTree t = parse_source("val s = \"count=${items.size()} name=$name\"");
    const SyntaxNode* str = find_kind(t.root, NodeKind::StringLiteral);
    REQUIRE(str != nullptr);
    CHECK(count_kind(*str, NodeKind::StringTemplateEntry) == 2);
    CHECK(count_kind(*str, NodeKind::CallExpr) == 1);
}

TEST_CASE("nested string literal inside a template hole") {
    SourceTree t = parse_source("val s = \"a ${wrap(\"$inner\")} z\"");
    CHECK(count_kind(t.root, NodeKind::StringLiteral) == 2);
    CHECK(count_kind(t.root, NodeKind::StringTemplateEntry) == 2);
}

TEST_CASE("template entry lines are relative to the hole position") {
    SourceTree t = parse_source("val s = \"\"\"a\n${f()}\n\"\"\"\n");
    const SyntaxNode* entry = find_kind(t.root, NodeKind::StringTemplateEntry);
    REQUIRE(entry != nullptr);
    CHECK(entry->start_line == 2);
    const SyntaxNode* call = find_kind(*entry, NodeKind::CallExpr);
    REQUIRE(call != nullptr);
    CHECK(call->start_line == 2);
}

TEST_CASE("typealias") {
    SourceTree t = parse_source("typealias Handler = (Int) -> Unit");
    const SyntaxNode* a = find_kind(t.root, NodeKind::TypeAliasDecl);
    REQUIRE(a != nullptr);
    CHECK(a->name == "Handler");
}

TEST_CASE("for loop with destructuring counts one destructuring declaration") {
    SourceTree t = parse_source("fun f(m: Map<String, Int>) { for ((k, v) in m) use(k, v) }");
    CHECK(count_kind(t.root, NodeKind::DestructuringDecl) == 1);
}

TEST_CASE("local vs member properties") {
    SourceTree t = parse_source(
        "val top = 1\n"
        "class C { val member = 2\n  fun f() { val local = 3; val viaLazy by lazy { 4 } } }\n");
    CHECK(count_kind(t.root, NodeKind::VariableDecl) == 1);   // local
    CHECK(count_kind(t.root, NodeKind::PropertyDecl) == 3);   // top, member, delegated local
}

TEST_CASE("property accessors attach to the property") {
    SourceTree t = parse_source(
        "class C {\n"
        "  var x: Int = 0\n"
        "    get() = field + 1\n"
        "    private set\n"
        "  fun f() = x\n"
        "}\n");
    CHECK(count_kind(t.root, NodeKind::PropertyDecl) == 1);
    CHECK(count_kind(t.root, NodeKind::FunctionDecl) == 1);
    CHECK(count_kind(t.root, NodeKind::CallExpr) == 0);
}

TEST_CASE("spans nest within parents") {
    SourceTree t = parse_source(
        "class A {\n"
        "  fun f() {\n"
        "    val x = listOf(1, 2).map { it + 1 }\n"
        "  }\n"
        "}\n");
    std::function<void(const SyntaxNode&)> walk = [&](const SyntaxNode& n) {
        for (const auto& c : n.children) {
            if (c.start_line == 0)
                continue;
            CHECK(c.start_line >= n.start_line);
            CHECK(c.end_line <= n.end_line);
            walk(c);
        }
    };
    walk(t.root);
}

TEST_CASE("unparsable soup degrades to Other without throwing") {
    SourceTree t = parse_source(") ) } ] -> ??? ,,, val ok = 1 ) )");
    CHECK(t.degraded_regions > 0);
    CHECK(count_kind(t.root, NodeKind::VariableDecl) + count_kind(t.root, NodeKind::PropertyDecl) == 1);
}

TEST_CASE("import and package lines become header nodes") {
    SourceTree t = parse_source(
        "package com.example.app\n"
        "import kotlinx.coroutines.launch\n"
        "import a.b.*\n"
        "val x = 1\n");
    CHECK(count_kind(t.root, NodeKind::CallExpr) == 0);
    CHECK(count_kind(t.root, NodeKind::PropertyDecl) == 1);
}

TEST_CASE("enum class body entries are not calls") {
    SourceTree t = parse_source(
        "enum class Color(val rgb: Int) {\n"
        "  RED(0xFF0000),\n"
        "  GREEN(0x00FF00);\n"
        "  fun hex() = rgb\n"
        "}\n");
    CHECK(count_kind(t.root, NodeKind::CallExpr) == 0);
    CHECK(count_kind(t.root, NodeKind::FunctionDecl) == 1);
    CHECK(count_kind(t.root, NodeKind::ClassDecl) == 1);
}

TEST_CASE("annotations are skipped as trivia") {
    SourceTree t = parse_source(
        "@Deprecated(\"use g\", ReplaceWith(\"g()\"))\n"
        "fun f() {}\n"
        "@JvmStatic fun g() {}\n");
    CHECK(count_kind(t.root, NodeKind::FunctionDecl) == 2);
    CHECK(count_kind(t.root, NodeKind::CallExpr) == 0);
    CHECK(count_kind(t.root, NodeKind::StringLiteral) == 0);
}

TEST_CASE("deeply nested input does not overflow") {
    std::string src = "val x = ";
    for (int i = 0; i < 3000; ++i)
        src += "(";
    src += "1";
    for (int i = 0; i < 3000; ++i)
        src += ")";
    SourceTree t = parse_source(src);
    CHECK(t.root.kind == NodeKind::Block);
}
