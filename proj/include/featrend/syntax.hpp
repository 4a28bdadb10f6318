#pragma once

#include "featrend/token.hpp"

#include <memory>
#include <string>
#include <vector>

namespace featrend {

enum class NodeKind {
    ClassDecl,
    ObjectDecl,
    CompanionObjectDecl,
    FunctionDecl,
    ConstructorDecl,
    PropertyDecl,
    VariableDecl,
    DestructuringDecl,
    LambdaExpr,
    CallExpr,
    CallArgument,
    BinaryOp,
    UnaryPostfixOp,
    WhenExpr,
    StringLiteral,
    StringTemplateEntry,
    TypeAliasDecl,
    SuperTypeEntry,
    Modifier,
    Block,
    Other,
};

const char* node_kind_name(NodeKind kind);

// Island-grammar node. `text` holds the operator text for BinaryOp /
// UnaryPostfixOp, the modifier word for Modifier, and a syntactic role tag
// ("if", "for", "when-entry", ...) for Other nodes. Unrecognized regions
// degrade to Other with no children.
struct SyntaxNode {
    NodeKind kind = NodeKind::Other;
    std::vector<SyntaxNode> children;

    std::string name;          // declared name / callee name / identifier
    std::string text;          // operator text, modifier word or role tag
    std::string receiver_type; // extension function receiver
    std::vector<std::string> modifiers;
    std::vector<std::string> components; // destructuring component names

    bool has_initializer = false;
    bool has_type_annotation = false;
    bool has_delegate = false;  // `by ...`
    bool ctor_property = false; // val/var primary-constructor parameter
    bool local_scope = false;
    bool anonymous = false; // object literal / anonymous function
    bool named_arg = false; // CallArgument written `name = expr`
    bool has_default = false;
    bool is_check = false; // when-entry with a positive `is T` condition

    int start_line = 0;
    int end_line = 0;

    bool has_modifier(std::string_view m) const {
        for (const auto& mod : modifiers)
            if (mod == m)
                return true;
        return false;
    }
};

struct SourceTree {
    std::string path;
    SyntaxNode root; // file-level container (kind Block)
    std::vector<Token> tokens;
    std::size_t token_count = 0;
    int physical_lines = 0;
    int degraded_regions = 0; // recovery events during parsing
};

// Builds a SourceTree from a token stream. Total: any UTF-8 input yields a
// tree; constructs outside the recognized subset become Other nodes.
SourceTree parse(std::vector<Token> tokens, const std::string& path = "");

// Convenience: tokenize + parse. Throws DecodeError for non-UTF-8 input.
SourceTree parse_source(std::string_view source, const std::string& path = "");

// Logical lines of code: physical lines carrying at least one token that is
// neither whitespace nor comment.
int count_lloc(const SourceTree& tree);

} // namespace featrend
