#include "featrend/feature.hpp"

#include "featrend/syntax.hpp"

#include <algorithm>
#include <cctype>

namespace featrend {

const std::array<FeatureKind, kFeatureKindCount>& all_feature_kinds() {
    static const std::array<FeatureKind, kFeatureKindCount> kinds = {
        FeatureKind::TypeInference,     FeatureKind::Lambda,
        FeatureKind::InlineFunction,    FeatureKind::SafeCall,
        FeatureKind::UnsafeCall,        FeatureKind::WhenExpr,
        FeatureKind::FuncWithDefaultValue, FeatureKind::FuncCallWithNamedArg,
        FeatureKind::SmartCast,         FeatureKind::DataClass,
        FeatureKind::RangeExpr,         FeatureKind::ExtensionFunction,
        FeatureKind::StringTemplate,    FeatureKind::SuperDelegation,
        FeatureKind::PropertyDelegation, FeatureKind::OperatorOverloading,
        FeatureKind::Singleton,         FeatureKind::CompanionObject,
        FeatureKind::DestructuringDecl, FeatureKind::InfixFunction,
        FeatureKind::TailrecFunction,   FeatureKind::SealedClass,
        FeatureKind::TypeAlias,         FeatureKind::Coroutine,
        FeatureKind::Contract,          FeatureKind::InlineClass,
    };
    return kinds;
}

const char* feature_kind_name(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::TypeInference: return "TypeInference";
    case FeatureKind::Lambda: return "Lambda";
    case FeatureKind::InlineFunction: return "InlineFunction";
    case FeatureKind::SafeCall: return "SafeCall";
    case FeatureKind::UnsafeCall: return "UnsafeCall";
    case FeatureKind::WhenExpr: return "WhenExpr";
    case FeatureKind::FuncWithDefaultValue: return "FuncWithDefaultValue";
    case FeatureKind::FuncCallWithNamedArg: return "FuncCallWithNamedArg";
    case FeatureKind::SmartCast: return "SmartCast";
    case FeatureKind::DataClass: return "DataClass";
    case FeatureKind::RangeExpr: return "RangeExpr";
    case FeatureKind::ExtensionFunction: return "ExtensionFunction";
    case FeatureKind::StringTemplate: return "StringTemplate";
    case FeatureKind::SuperDelegation: return "SuperDelegation";
    case FeatureKind::PropertyDelegation: return "PropertyDelegation";
    case FeatureKind::OperatorOverloading: return "OperatorOverloading";
    case FeatureKind::Singleton: return "Singleton";
    case FeatureKind::CompanionObject: return "CompanionObject";
    case FeatureKind::DestructuringDecl: return "DestructuringDecl";
    case FeatureKind::InfixFunction: return "InfixFunction";
    case FeatureKind::TailrecFunction: return "TailrecFunction";
    case FeatureKind::SealedClass: return "SealedClass";
    case FeatureKind::TypeAlias: return "TypeAlias";
    case FeatureKind::Coroutine: return "Coroutine";
    case FeatureKind::Contract: return "Contract";
    case FeatureKind::InlineClass: return "InlineClass";
    }
    return "Unknown";
}

std::optional<FeatureKind> feature_kind_from_name(std::string_view name) {
    for (FeatureKind k : all_feature_kinds())
        if (name == feature_kind_name(k))
            return k;
    return std::nullopt;
}

DenominatorCounts& DenominatorCounts::operator+=(const DenominatorCounts& o) {
    variable_declarations += o.variable_declarations;
    named_functions += o.named_functions;
    constructors += o.constructors;
    classes += o.classes;
    function_calls += o.function_calls;
    strings += o.strings;
    properties += o.properties;
    inheritances += o.inheritances;
    object_declarations += o.object_declarations;
    lloc += o.lloc;
    return *this;
}

std::map<FeatureKind, std::int64_t> FileFeatureReport::counts_by_kind() const {
    std::map<FeatureKind, std::int64_t> counts;
    for (const auto& inst : instances)
        ++counts[inst.kind];
    return counts;
}

FeatureConfig FeatureConfig::defaults() {
    FeatureConfig cfg;
    for (FeatureKind k : all_feature_kinds())
        cfg.enabled.insert(k);
    cfg.coroutine_keywords = {"launch",       "async", "runBlocking",
                              "withContext",  "coroutineScope", "delay"};
    cfg.range_infix_names = {"until", "downTo"};
    return cfg;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

} // namespace

FeatureConfig FeatureConfig::from_file_text(std::string_view text, const FeatureConfig& base) {
    FeatureConfig cfg = base;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view raw =
            text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty())
            continue;
        if (line.rfind("coroutine:", 0) == 0) {
            cfg.coroutine_keywords.insert(trim(line.substr(10)));
            continue;
        }
        if (line.rfind("range-infix:", 0) == 0) {
            cfg.range_infix_names.insert(trim(line.substr(12)));
            continue;
        }
        bool disable = line[0] == '-';
        std::string name = disable ? trim(line.substr(1)) : line;
        if (auto kind = feature_kind_from_name(name)) {
            if (disable)
                cfg.enabled.erase(*kind);
            else
                cfg.enabled.insert(*kind);
        }
    }
    return cfg;
}

void FeatureConfig::set_enabled_list(std::string_view csv) {
    enabled.clear();
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        std::string name =
            trim(csv.substr(start, comma == std::string_view::npos ? csv.size() - start
                                                                   : comma - start));
        start = comma == std::string_view::npos ? csv.size() + 1 : comma + 1;
        if (name.empty())
            continue;
        if (auto kind = feature_kind_from_name(name))
            enabled.insert(*kind);
    }
}

namespace {

bool is_name_node(const SyntaxNode& n) {
    return n.kind == NodeKind::Other && n.text == "name" && !n.name.empty();
}

class Walker {
public:
    Walker(const FeatureConfig& cfg, const std::string& path)
        : cfg_(cfg), path_(path) {}

    FileFeatureReport run(const SourceTree& tree) {
        rep_.path = path_;
        walk(tree.root);
        rep_.denominators.lloc = count_lloc(tree);
        return std::move(rep_);
    }

private:
    const FeatureConfig& cfg_;
    const std::string& path_;
    FileFeatureReport rep_;
    int fn_depth_ = 0;
    std::vector<std::string> guards_;     // identifiers smart-cast by `is`
    std::vector<std::string> suppressed_; // guarded ids with an explicit cast

    void add(FeatureKind kind, int line) {
        if (!cfg_.is_enabled(kind))
            return;
        rep_.instances.push_back({kind, path_, std::max(line, 1)});
    }

    bool guard_active(const std::string& id) const {
        if (std::find(guards_.begin(), guards_.end(), id) == guards_.end())
            return false;
        return std::find(suppressed_.begin(), suppressed_.end(), id) == suppressed_.end();
    }

    // top-level `x is T` conjuncts of a condition
    static void collect_is_guards(const SyntaxNode& cond, std::vector<std::string>& out) {
        if (cond.kind == NodeKind::BinaryOp && cond.text == "&&") {
            for (const auto& c : cond.children)
                collect_is_guards(c, out);
            return;
        }
        if (cond.kind == NodeKind::Other && cond.text == "paren" && !cond.children.empty()) {
            collect_is_guards(cond.children.front(), out);
            return;
        }
        if (cond.kind == NodeKind::BinaryOp && cond.text == "is" &&
            !cond.children.empty() && is_name_node(cond.children.front()))
            out.push_back(cond.children.front().name);
    }

    static void collect_explicit_casts(const SyntaxNode& n, std::vector<std::string>& out) {
        if (n.kind == NodeKind::BinaryOp && (n.text == "as" || n.text == "as?") &&
            !n.children.empty() && is_name_node(n.children.front()))
            out.push_back(n.children.front().name);
        for (const auto& c : n.children)
            collect_explicit_casts(c, out);
    }

    void walk_guarded(const SyntaxNode& body, const std::vector<std::string>& new_guards) {
        std::size_t gmark = guards_.size();
        std::size_t smark = suppressed_.size();
        guards_.insert(guards_.end(), new_guards.begin(), new_guards.end());
        std::vector<std::string> casts;
        collect_explicit_casts(body, casts);
        for (const auto& id : new_guards)
            if (std::find(casts.begin(), casts.end(), id) != casts.end())
                suppressed_.push_back(id);
        walk(body);
        guards_.resize(gmark);
        suppressed_.resize(smark);
    }

    void walk_children(const SyntaxNode& n, int fn_delta = 0) {
        fn_depth_ += fn_delta;
        for (const auto& c : n.children)
            walk(c);
        fn_depth_ -= fn_delta;
    }

    void walk(const SyntaxNode& n) {
        switch (n.kind) {
        case NodeKind::ClassDecl:
            ++rep_.denominators.classes;
            if (n.has_modifier("data"))
                add(FeatureKind::DataClass, n.start_line);
            if (n.has_modifier("sealed"))
                add(FeatureKind::SealedClass, n.start_line);
            if (n.has_modifier("inline"))
                add(FeatureKind::InlineClass, n.start_line);
            walk_children(n);
            return;
        case NodeKind::ObjectDecl:
            ++rep_.denominators.object_declarations;
            if (!n.anonymous)
                add(FeatureKind::Singleton, n.start_line);
            walk_children(n);
            return;
        case NodeKind::CompanionObjectDecl:
            ++rep_.denominators.object_declarations;
            add(FeatureKind::CompanionObject, n.start_line);
            walk_children(n);
            return;
        case NodeKind::FunctionDecl: {
            bool named = !n.anonymous && !n.name.empty();
            if (named)
                ++rep_.denominators.named_functions;
            if (named && !n.receiver_type.empty())
                add(FeatureKind::ExtensionFunction, n.start_line);
            if (n.has_modifier("inline"))
                add(FeatureKind::InlineFunction, n.start_line);
            if (n.has_modifier("operator"))
                add(FeatureKind::OperatorOverloading, n.start_line);
            if (n.has_modifier("infix"))
                add(FeatureKind::InfixFunction, n.start_line);
            if (n.has_modifier("tailrec"))
                add(FeatureKind::TailrecFunction, n.start_line);
            if (n.has_modifier("suspend"))
                add(FeatureKind::Coroutine, n.start_line);
            if (n.has_default)
                add(FeatureKind::FuncWithDefaultValue, n.start_line);
            walk_children(n, 1);
            return;
        }
        case NodeKind::ConstructorDecl:
            ++rep_.denominators.constructors;
            if (n.has_default)
                add(FeatureKind::FuncWithDefaultValue, n.start_line);
            walk_children(n, 1);
            return;
        case NodeKind::PropertyDecl:
            ++rep_.denominators.properties;
            if (!n.ctor_property) {
                ++rep_.denominators.variable_declarations;
                if (n.has_initializer && !n.has_type_annotation)
                    add(FeatureKind::TypeInference, n.start_line);
            }
            if (n.has_delegate)
                add(FeatureKind::PropertyDelegation, n.start_line);
            walk_children(n);
            return;
        case NodeKind::VariableDecl:
            ++rep_.denominators.variable_declarations;
            if (n.has_initializer && !n.has_type_annotation)
                add(FeatureKind::TypeInference, n.start_line);
            walk_children(n);
            return;
        case NodeKind::DestructuringDecl:
            rep_.denominators.variable_declarations +=
                std::max<std::int64_t>(1, static_cast<std::int64_t>(n.components.size()));
            add(FeatureKind::DestructuringDecl, n.start_line);
            walk_children(n);
            return;
        case NodeKind::LambdaExpr:
            add(FeatureKind::Lambda, n.start_line);
            if (n.has_modifier("suspend"))
                add(FeatureKind::Coroutine, n.start_line);
            walk_children(n, 1);
            return;
        case NodeKind::CallExpr: {
            ++rep_.denominators.function_calls;
            bool named_arg = false;
            int lambda_args = 0;
            int other_args = 0;
            for (const auto& c : n.children) {
                if (c.kind == NodeKind::CallArgument) {
                    if (c.named_arg)
                        named_arg = true;
                    if (c.children.size() == 1 &&
                        c.children.front().kind == NodeKind::LambdaExpr)
                        ++lambda_args;
                    else
                        ++other_args;
                } else if (c.kind == NodeKind::LambdaExpr) {
                    ++lambda_args;
                }
            }
            if (named_arg)
                add(FeatureKind::FuncCallWithNamedArg, n.start_line);
            if (cfg_.coroutine_keywords.count(n.name))
                add(FeatureKind::Coroutine, n.start_line);
            if (n.name == "contract" && fn_depth_ > 0 && lambda_args == 1 && other_args == 0)
                add(FeatureKind::Contract, n.start_line);
            walk_children(n);
            return;
        }
        case NodeKind::CallArgument:
            walk_children(n);
            return;
        case NodeKind::BinaryOp:
            if (n.text == "?.") {
                add(FeatureKind::SafeCall, n.start_line);
                check_receiver(n);
            } else if (n.text == ".." || n.text == "..<" ||
                       cfg_.range_infix_names.count(n.text)) {
                add(FeatureKind::RangeExpr, n.start_line);
            }
            walk_children(n);
            return;
        case NodeKind::UnaryPostfixOp:
            if (n.text == "!!")
                add(FeatureKind::UnsafeCall, n.start_line);
            walk_children(n);
            return;
        case NodeKind::WhenExpr:
            add(FeatureKind::WhenExpr, n.start_line);
            walk_when(n);
            return;
        case NodeKind::StringLiteral: {
            ++rep_.denominators.strings;
            bool templated = false;
            for (const auto& c : n.children)
                if (c.kind == NodeKind::StringTemplateEntry)
                    templated = true;
            if (templated)
                add(FeatureKind::StringTemplate, n.start_line);
            walk_children(n);
            return;
        }
        case NodeKind::StringTemplateEntry:
            walk_children(n);
            return;
        case NodeKind::SuperTypeEntry:
            ++rep_.denominators.inheritances;
            if (n.has_delegate)
                add(FeatureKind::SuperDelegation, n.start_line);
            walk_children(n);
            return;
        case NodeKind::TypeAliasDecl:
            add(FeatureKind::TypeAlias, n.start_line);
            walk_children(n);
            return;
        case NodeKind::Modifier:
            return;
        case NodeKind::Block:
            walk_children(n);
            return;
        case NodeKind::Other:
            if (n.text == "if") {
                walk_if(n);
                return;
            }
            if (n.text == ".")
                check_receiver(n);
            walk_children(n);
            return;
        }
    }

    void check_receiver(const SyntaxNode& access) {
        if (access.children.empty())
            return;
        const SyntaxNode& recv = access.children.front();
        if (is_name_node(recv) && guard_active(recv.name))
            add(FeatureKind::SmartCast, access.start_line);
    }

    void walk_if(const SyntaxNode& n) {
        if (n.children.empty())
            return;
        const SyntaxNode& cond = n.children.front();
        walk(cond);
        std::vector<std::string> new_guards;
        collect_is_guards(cond, new_guards);
        if (n.children.size() > 1) {
            if (new_guards.empty())
                walk(n.children[1]);
            else
                walk_guarded(n.children[1], new_guards);
        }
        for (std::size_t i = 2; i < n.children.size(); ++i)
            walk(n.children[i]);
    }

    void walk_when(const SyntaxNode& n) {
        const std::string& subject = n.name;
        for (const auto& c : n.children) {
            bool entry = c.kind == NodeKind::Other && c.text == "when-entry";
            if (entry && c.is_check && !subject.empty())
                walk_guarded(c, {subject});
            else
                walk(c);
        }
    }
};

} // namespace

FileFeatureReport detect(const SourceTree& tree, const FeatureConfig& config) {
    return Walker(config, tree.path).run(tree);
}

FileFeatureReport detect(const SourceTree& tree) {
    return detect(tree, FeatureConfig::defaults());
}

} // namespace featrend
