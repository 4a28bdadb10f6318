#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace featrend {

// The 26 analyzed Kotlin features. Null-safety and delegation are split in
// two kinds each.
enum class FeatureKind : std::uint8_t {
    TypeInference,
    Lambda,
    InlineFunction,
    SafeCall,
    UnsafeCall,
    WhenExpr,
    FuncWithDefaultValue,
    FuncCallWithNamedArg,
    SmartCast,
    DataClass,
    RangeExpr,
    ExtensionFunction,
    StringTemplate,
    SuperDelegation,
    PropertyDelegation,
    OperatorOverloading,
    Singleton,
    CompanionObject,
    DestructuringDecl,
    InfixFunction,
    TailrecFunction,
    SealedClass,
    TypeAlias,
    Coroutine,
    Contract,
    InlineClass,
};

constexpr std::size_t kFeatureKindCount = 26;

const std::array<FeatureKind, kFeatureKindCount>& all_feature_kinds();
const char* feature_kind_name(FeatureKind kind);
std::optional<FeatureKind> feature_kind_from_name(std::string_view name);

struct FeatureInstance {
    FeatureKind kind;
    std::string path;
    int line = 1;
};

// Table of population counts used to normalize feature instances.
struct DenominatorCounts {
    std::int64_t variable_declarations = 0;
    std::int64_t named_functions = 0;
    std::int64_t constructors = 0;
    std::int64_t classes = 0;
    std::int64_t function_calls = 0;
    std::int64_t strings = 0;
    std::int64_t properties = 0;
    std::int64_t inheritances = 0;
    std::int64_t object_declarations = 0;
    std::int64_t lloc = 0;

    DenominatorCounts& operator+=(const DenominatorCounts& o);
    bool operator==(const DenominatorCounts&) const = default;
};

struct FileFeatureReport {
    std::string path;
    std::vector<FeatureInstance> instances;
    DenominatorCounts denominators;

    std::map<FeatureKind, std::int64_t> counts_by_kind() const;
};

// Detection configuration: enabled kinds, the coroutine keyword set and the
// infix names counted as range expressions.
struct FeatureConfig {
    std::set<FeatureKind> enabled;
    std::set<std::string> coroutine_keywords;
    std::set<std::string> range_infix_names;

    static FeatureConfig defaults();
    bool is_enabled(FeatureKind kind) const { return enabled.count(kind) != 0; }

    // One entry per line: `-Kind` disables, `Kind` enables,
    // `coroutine:word` / `range-infix:word` extend keyword sets, `#` comments.
    static FeatureConfig from_file_text(std::string_view text, const FeatureConfig& base);
    // Comma-separated kind list replacing the enabled set (--features).
    void set_enabled_list(std::string_view csv);
};

struct SourceTree;

FileFeatureReport detect(const SourceTree& tree);
FileFeatureReport detect(const SourceTree& tree, const FeatureConfig& config);

} // namespace featrend
