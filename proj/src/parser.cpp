#include "featrend/syntax.hpp"

#include "featrend/error.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <set>
#include <string>
#include <string_view>

namespace featrend {

const char* node_kind_name(NodeKind kind) {
    switch (kind) {
    case NodeKind::ClassDecl: return "ClassDecl";
    case NodeKind::ObjectDecl: return "ObjectDecl";
    case NodeKind::CompanionObjectDecl: return "CompanionObjectDecl";
    case NodeKind::FunctionDecl: return "FunctionDecl";
    case NodeKind::ConstructorDecl: return "ConstructorDecl";
    case NodeKind::PropertyDecl: return "PropertyDecl";
    case NodeKind::VariableDecl: return "VariableDecl";
    case NodeKind::DestructuringDecl: return "DestructuringDecl";
    case NodeKind::LambdaExpr: return "LambdaExpr";
    case NodeKind::CallExpr: return "CallExpr";
    case NodeKind::CallArgument: return "CallArgument";
    case NodeKind::BinaryOp: return "BinaryOp";
    case NodeKind::UnaryPostfixOp: return "UnaryPostfixOp";
    case NodeKind::WhenExpr: return "WhenExpr";
    case NodeKind::StringLiteral: return "StringLiteral";
    case NodeKind::StringTemplateEntry: return "StringTemplateEntry";
    case NodeKind::TypeAliasDecl: return "TypeAliasDecl";
    case NodeKind::SuperTypeEntry: return "SuperTypeEntry";
    case NodeKind::Modifier: return "Modifier";
    case NodeKind::Block: return "Block";
    case NodeKind::Other: return "Other";
    }
    return "Other";
}

namespace {

enum class Scope { TopLevel, ClassBody, Local };

const std::set<std::string_view>& modifier_words() {
    static const std::set<std::string_view> words = {
        "abstract", "actual",   "annotation", "companion", "const",
        "crossinline", "data",  "enum",       "expect",    "external",
        "final",    "infix",    "inline",     "inner",     "internal",
        "lateinit", "noinline", "open",       "operator",  "out",
        "override", "private",  "protected",  "public",    "reified",
        "sealed",   "suspend",  "tailrec",    "value",     "vararg"};
    return words;
}

int token_end_line(const Token& t) {
    int line = t.line;
    for (char c : t.text)
        if (c == '\n')
            ++line;
    return line;
}

constexpr int kMaxDepth = 200;

class Parser {
public:
    Parser(const std::vector<Token>& tokens, int first_line, int first_col)
        : tokens_(tokens), base_line_(first_line), base_col_(first_col) {
        for (std::size_t i = 0; i < tokens_.size(); ++i)
            if (!tokens_[i].is_trivia())
                sig_.push_back(i);
        (void)base_line_;
        (void)base_col_;
    }

    SyntaxNode parse_file(Scope scope) {
        SyntaxNode root;
        root.kind = NodeKind::Block;
        root.text = "file";
        root.start_line = 1;
        while (!at_end()) {
            std::size_t before = pos_;
            parse_element(root, scope);
            if (pos_ == before) { // recovery: never stall
                append_other_token(root);
                ++degraded_;
            }
        }
        finalize(root);
        if (root.start_line == 0)
            root.start_line = 1;
        if (root.end_line == 0)
            root.end_line = root.start_line;
        return root;
    }

    int degraded() const { return degraded_; }

private:
    const std::vector<Token>& tokens_;
    std::vector<std::size_t> sig_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    int degraded_ = 0;
    int base_line_;
    int base_col_;

    // ---- token access -------------------------------------------------

    bool at_end() const { return pos_ >= sig_.size(); }

    const Token& tok(std::size_t off = 0) const {
        static const Token eof{TokenKind::Other, "", 0x7fffffff, 1};
        return pos_ + off < sig_.size() ? tokens_[sig_[pos_ + off]] : eof;
    }

    std::string_view text(std::size_t off = 0) const { return tok(off).text; }

    bool is(std::string_view s, std::size_t off = 0) const { return text(off) == s; }

    bool is_ident(std::size_t off = 0) const {
        return tok(off).kind == TokenKind::Identifier;
    }

    void advance() {
        if (!at_end())
            ++pos_;
    }

    bool accept(std::string_view s) {
        if (is(s)) {
            advance();
            return true;
        }
        return false;
    }

    int cur_line() const { return tok().line; }
    int prev_end_line() const {
        return pos_ == 0 ? 1 : token_end_line(tokens_[sig_[pos_ - 1]]);
    }
    bool same_line_as_prev() const { return !at_end() && cur_line() == prev_end_line(); }

    // ---- node helpers --------------------------------------------------

    SyntaxNode make(NodeKind kind) {
        SyntaxNode n;
        n.kind = kind;
        n.start_line = at_end() ? prev_end_line() : cur_line();
        n.end_line = n.start_line;
        return n;
    }

    void finalize(SyntaxNode& n) {
        int last = at_end() ? (sig_.empty() ? n.start_line : token_end_line(tokens_[sig_.back()]))
                            : prev_end_line();
        n.end_line = std::max(n.end_line, last);
        for (const auto& c : n.children) {
            if (c.start_line > 0 && (n.start_line == 0 || c.start_line < n.start_line))
                n.start_line = c.start_line;
            n.end_line = std::max(n.end_line, c.end_line);
        }
    }

    void append_other_token(SyntaxNode& parent) {
        SyntaxNode n = make(NodeKind::Other);
        n.name = std::string(text());
        advance();
        finalize(n);
        parent.children.push_back(std::move(n));
    }

    void attach_modifiers(SyntaxNode& n, const std::vector<std::string>& mods) {
        for (const auto& m : mods) {
            n.modifiers.push_back(m);
            SyntaxNode mod = make(NodeKind::Modifier);
            mod.text = m;
            n.children.push_back(std::move(mod));
        }
    }

    // ---- trivia-like syntax ---------------------------------------------

    void skip_annotations_and_labels() {
        for (;;) {
            if (is("@")) {
                advance();
                if (is_ident() && is(":", 1)) { // use-site target  @file:
                    advance();
                    advance();
                }
                if (is("[")) { // @[Foo Bar]
                    skip_balanced("[", "]");
                    continue;
                }
                while (is_ident()) {
                    advance();
                    if (is("<"))
                        try_skip_type_args();
                    if (is("."))
                        advance();
                    else
                        break;
                }
                if (is("(") && same_line_as_prev())
                    skip_balanced("(", ")"); // annotation arguments are trivia
                continue;
            }
            if (is_ident() && is("@", 1) && tok(1).line == cur_line()) {
                // label definition  outer@
                advance();
                advance();
                continue;
            }
            break;
        }
    }

    void skip_balanced(std::string_view open, std::string_view close) {
        if (!is(open))
            return;
        int depth = 0;
        while (!at_end()) {
            if (is(open))
                ++depth;
            else if (is(close))
                --depth;
            advance();
            if (depth == 0)
                return;
        }
    }

    // Decide whether a '<' begins type arguments; skip them when it does.
    bool try_skip_type_args() {
        if (!is("<"))
            return false;
        std::size_t scan = pos_;
        int depth = 0;
        std::size_t limit = pos_ + 160;
        while (scan < sig_.size() && scan < limit) {
            std::string_view t = tokens_[sig_[scan]].text;
            if (t == "<")
                ++depth;
            else if (t == ">") {
                --depth;
                if (depth == 0) {
                    pos_ = scan + 1;
                    return true;
                }
            } else if (t == "(" || t == ")" || t == "{" || t == "}" || t == ";" || t == "=")
                return false;
            ++scan;
        }
        return false;
    }

    // ---- types -----------------------------------------------------------

    // Tolerant type reference; returns the consumed text.
    std::string parse_type_ref() {
        std::string out;
        if (accept("suspend"))
            out += "suspend ";
        if (is("(")) {
            std::size_t start = pos_;
            skip_balanced("(", ")");
            for (std::size_t i = start; i < pos_ && i < sig_.size(); ++i)
                out += tokens_[sig_[i]].text;
            if (is("->")) {
                advance();
                out += " -> " + parse_type_ref();
            }
            while (accept("?"))
                out += "?";
            return out;
        }
        for (;;) {
            if (!is_ident() && !is("*") && tok().kind != TokenKind::Keyword)
                break;
            out += text();
            advance();
            if (is("<")) {
                std::size_t start = pos_;
                if (try_skip_type_args())
                    for (std::size_t i = start; i < pos_; ++i)
                        out += tokens_[sig_[i]].text;
            }
            while (is("?")) {
                out += "?";
                advance();
            }
            if (is(".") && (is_ident(1) || tok(1).kind == TokenKind::Keyword)) {
                out += ".";
                advance();
                continue;
            }
            break;
        }
        if (is("->")) { // function type after parameter-less form
            advance();
            out += " -> " + parse_type_ref();
        }
        return out;
    }

    // ---- declarations ------------------------------------------------------

    void parse_element(SyntaxNode& parent, Scope scope) {
        while (is(";"))
            advance();
        if (at_end())
            return;
        skip_annotations_and_labels();
        if (at_end())
            return;

        if (scope == Scope::TopLevel && is_ident() &&
            (is("import") || is("package")) && !is(".", 1)) {
            skip_header_line(parent);
            return;
        }

        std::vector<std::string> mods;
        if (!collect_modifiers(mods)) {
            // modifier-looking words that do not precede a declaration are
            // ordinary expression text
        }

        if (is("fun") && is("interface", 1)) {
            mods.push_back("fun");
            advance();
            parent.children.push_back(parse_class(mods));
            return;
        }
        if (is("class") || is("interface")) {
            parent.children.push_back(parse_class(mods));
            return;
        }
        if (is("object")) {
            parent.children.push_back(parse_object_decl(mods));
            return;
        }
        if (is("fun")) {
            parent.children.push_back(parse_function(mods, scope));
            return;
        }
        if (is("val") || is("var")) {
            parent.children.push_back(parse_property(mods, scope));
            return;
        }
        if (is("typealias")) {
            parent.children.push_back(parse_typealias(mods));
            return;
        }
        if (is("constructor") && scope == Scope::ClassBody) {
            parent.children.push_back(parse_secondary_constructor(mods));
            return;
        }
        if (is("init") && is("{", 1) && scope == Scope::ClassBody) {
            advance();
            parent.children.push_back(parse_block());
            return;
        }
        if (!mods.empty()) {
            // declaration-less modifier run (e.g. bare `private set` accessor
            // fragments); keep the words as Other
            SyntaxNode n = make(NodeKind::Other);
            n.text = "modifier-run";
            attach_modifiers(n, mods);
            finalize(n);
            parent.children.push_back(std::move(n));
            return;
        }
        parse_statement(parent, scope);
    }

    void skip_header_line(SyntaxNode& parent) {
        SyntaxNode n = make(NodeKind::Other);
        n.text = std::string(text()); // "import" / "package"
        int line = cur_line();
        while (!at_end() && cur_line() == line && !is(";"))
            advance();
        while (is(";"))
            advance();
        finalize(n);
        parent.children.push_back(std::move(n));
    }

    bool collect_modifiers(std::vector<std::string>& mods) {
        std::size_t scan = pos_;
        const auto& words = modifier_words();
        while (scan < sig_.size()) {
            const Token& t = tokens_[sig_[scan]];
            if (t.kind == TokenKind::Identifier && words.count(t.text))
                ++scan;
            else
                break;
        }
        if (scan == pos_)
            return false;
        std::string_view next = scan < sig_.size() ? tokens_[sig_[scan]].text : "";
        static const std::set<std::string_view> decl_starts = {
            "class", "interface", "object", "fun", "val",
            "var",   "typealias", "constructor", "get", "set"};
        bool followed_by_decl =
            decl_starts.count(next) ||
            (scan < sig_.size() && tokens_[sig_[scan]].kind == TokenKind::Identifier &&
             (next == "get" || next == "set"));
        if (!followed_by_decl)
            return false;
        while (pos_ < scan) {
            mods.push_back(std::string(text()));
            advance();
        }
        return true;
    }

    SyntaxNode parse_class(std::vector<std::string> mods) {
        SyntaxNode n = make(NodeKind::ClassDecl);
        n.text = std::string(text()); // class | interface
        advance();
        attach_modifiers(n, mods);
        if (is_ident()) {
            n.name = std::string(text());
            advance();
        }
        if (is("<"))
            try_skip_type_args();
        // primary constructor
        std::vector<std::string> ctor_mods;
        std::size_t save = pos_;
        if (!is("(")) {
            collect_ctor_modifiers(ctor_mods);
            if (!is("constructor") && !is("(")) {
                pos_ = save;
                ctor_mods.clear();
            }
        }
        accept("constructor");
        if (is("(")) {
            SyntaxNode ctor = make(NodeKind::ConstructorDecl);
            ctor.text = "primary";
            attach_modifiers(ctor, ctor_mods);
            parse_parameters(ctor, /*allow_properties=*/true);
            finalize(ctor);
            n.children.push_back(std::move(ctor));
        }
        if (accept(":"))
            parse_supertype_list(n);
        skip_where_clause();
        if (is("{")) {
            if (n.has_modifier("enum"))
                parse_enum_body(n);
            else
                parse_class_body(n);
        }
        finalize(n);
        return n;
    }

    void collect_ctor_modifiers(std::vector<std::string>& mods) {
        const auto& words = modifier_words();
        while (is_ident() && words.count(text())) {
            std::string_view after = text(1);
            if (after != "constructor" && !(tok(1).kind == TokenKind::Identifier &&
                                            words.count(after)))
                break;
            mods.push_back(std::string(text()));
            advance();
        }
    }

    void skip_where_clause() {
        if (!is_ident() || !is("where"))
            return;
        advance();
        while (!at_end() && !is("{") && !is("=") && !is(";")) {
            if (is("}"))
                break;
            advance();
        }
    }

    void parse_supertype_list(SyntaxNode& parent) {
        do {
            skip_annotations_and_labels();
            SyntaxNode entry = make(NodeKind::SuperTypeEntry);
            entry.name = parse_type_ref();
            if (entry.name.empty())
                break;
            if (is("(") && same_line_as_prev())
                parse_value_arguments(entry); // supertype constructor call
            if (is_ident() && is("by")) {
                advance();
                entry.has_delegate = true;
                entry.children.push_back(parse_expression());
            }
            finalize(entry);
            parent.children.push_back(std::move(entry));
        } while (accept(","));
    }

    void parse_class_body(SyntaxNode& parent) {
        if (!accept("{"))
            return;
        ++depth_;
        while (!at_end() && !is("}")) {
            std::size_t before = pos_;
            if (is("companion")) {
                std::vector<std::string> mods;
                collect_modifiers(mods);
                if (is("object")) {
                    parent.children.push_back(parse_object_decl(mods));
                    continue;
                }
            }
            parse_element(parent, Scope::ClassBody);
            if (pos_ == before) {
                append_other_token(parent);
                ++degraded_;
            }
        }
        accept("}");
        --depth_;
    }

    void parse_enum_body(SyntaxNode& parent) {
        if (!accept("{"))
            return;
        ++depth_;
        bool entries_done = false;
        while (!at_end() && !is("}")) {
            if (is(";")) {
                advance();
                entries_done = true;
                continue;
            }
            if (entries_done) {
                std::size_t before = pos_;
                parse_element(parent, Scope::ClassBody);
                if (pos_ == before) {
                    append_other_token(parent);
                    ++degraded_;
                }
                continue;
            }
            skip_annotations_and_labels();
            if (is_ident()) {
                SyntaxNode entry = make(NodeKind::Other);
                entry.text = "enum-entry";
                entry.name = std::string(text());
                advance();
                if (is("("))
                    parse_value_arguments(entry); // entry ctor args, not a call
                if (is("{")) {
                    parse_class_body(entry);
                }
                finalize(entry);
                parent.children.push_back(std::move(entry));
                accept(",");
                continue;
            }
            append_other_token(parent);
            ++degraded_;
        }
        accept("}");
        --depth_;
    }

    SyntaxNode parse_object_decl(std::vector<std::string> mods) {
        bool companion =
            std::find(mods.begin(), mods.end(), "companion") != mods.end();
        SyntaxNode n = make(companion ? NodeKind::CompanionObjectDecl : NodeKind::ObjectDecl);
        advance(); // object
        attach_modifiers(n, mods);
        if (is_ident()) {
            n.name = std::string(text());
            advance();
        }
        if (accept(":"))
            parse_supertype_list(n);
        if (is("{"))
            parse_class_body(n);
        finalize(n);
        return n;
    }

    SyntaxNode parse_function(std::vector<std::string> mods, Scope scope) {
        SyntaxNode n = make(NodeKind::FunctionDecl);
        advance(); // fun
        attach_modifiers(n, mods);
        n.local_scope = scope == Scope::Local;
        if (is("<"))
            try_skip_type_args();
        // receiver chain: segments separated by '.', the one before '(' is
        // the function name
        std::string receiver;
        for (;;) {
            if (is("(") && n.name.empty() && receiver.empty())
                break; // anonymous function, no receiver
            if (!is_ident() && tok().kind != TokenKind::Keyword)
                break;
            std::string seg(text());
            advance();
            if (is("<")) {
                std::size_t start = pos_;
                if (try_skip_type_args())
                    for (std::size_t i = start; i < pos_; ++i)
                        seg += tokens_[sig_[i]].text;
            }
            while (is("?")) {
                seg += "?";
                advance();
            }
            if (is(".")) {
                advance();
                receiver += receiver.empty() ? seg : "." + seg;
                continue;
            }
            n.name = seg;
            break;
        }
        n.receiver_type = receiver;
        if (!receiver.empty() && n.name.empty()) {
            // `fun Receiver.` without a name: keep the receiver,, stay anonymous
            n.anonymous = true;
        }
        if (n.name.empty() && receiver.empty())
            n.anonymous = true;
        if (is("("))
            parse_parameters(n, /*allow_properties=*/false);
        if (accept(":")) {
            n.has_type_annotation = true;
            parse_type_ref();
        }
        skip_where_clause();
        if (is("{")) {
            n.children.push_back(parse_block());
        } else if (accept("=")) {
            n.has_initializer = true;
            n.children.push_back(parse_expression());
        }
        finalize(n);
        return n;
    }

    void parse_parameters(SyntaxNode& owner, bool allow_properties) {
        if (!accept("("))
            return;
        ++depth_;
        while (!at_end() && !is(")")) {
            skip_annotations_and_labels();
            std::vector<std::string> pmods;
            const auto& words = modifier_words();
            while (is_ident() && words.count(text()) &&
                   (is_ident(1) || text(1) == "val" || text(1) == "var"))
            {
                pmods.push_back(std::string(text()));
                advance();
            }
            if (allow_properties && (is("val") || is("var"))) {
                SyntaxNode prop = make(NodeKind::PropertyDecl);
                prop.text = std::string(text());
                advance();
                attach_modifiers(prop, pmods);
                prop.ctor_property = true;
                if (is_ident()) {
                    prop.name = std::string(text());
                    advance();
                }
                if (accept(":")) {
                    prop.has_type_annotation = true;
                    parse_type_ref();
                }
                if (accept("=")) {
                    owner.has_default = true;
                    prop.children.push_back(parse_expression());
                }
                finalize(prop);
                owner.children.push_back(std::move(prop));
            } else {
                SyntaxNode param = make(NodeKind::Other);
                param.text = "param";
                if (is_ident()) {
                    param.name = std::string(text());
                    advance();
                }
                if (accept(":"))
                    parse_type_ref();
                if (accept("=")) {
                    owner.has_default = true;
                    param.has_default = true;
                    param.children.push_back(parse_expression());
                }
                finalize(param);
                owner.children.push_back(std::move(param));
            }
            if (!accept(","))
                break;
        }
        accept(")");
        --depth_;
    }

    SyntaxNode parse_property(std::vector<std::string> mods, Scope scope) {
        std::string decl_word(text()); // val | var
        int decl_line = cur_line();
        advance();
        if (is("<"))
            try_skip_type_args();

        if (is("(")) { // destructuring declaration
            SyntaxNode n = make(NodeKind::DestructuringDecl);
            n.start_line = decl_line;
            n.text = decl_word;
            attach_modifiers(n, mods);
            advance();
            while (!at_end() && !is(")")) {
                if (is_ident()) {
                    n.components.push_back(std::string(text()));
                    advance();
                    if (accept(":"))
                        parse_type_ref();
                } else {
                    advance();
                }
                if (!accept(","))
                    break;
            }
            accept(")");
            if (accept("=")) {
                n.has_initializer = true;
                n.children.push_back(parse_expression());
            }
            finalize(n);
            return n;
        }

        SyntaxNode n = make(NodeKind::PropertyDecl);
        n.start_line = decl_line;
        n.text = decl_word;
        attach_modifiers(n, mods);
        n.local_scope = scope == Scope::Local;
        // receiver chain for extension properties
        std::string receiver;
        for (;;) {
            if (!is_ident())
                break;
            std::string seg(text());
            if (is(".", 1)) {
                advance();
                advance();
                receiver += receiver.empty() ? seg : "." + seg;
                if (is("<")) {
                    std::size_t start = pos_;
                    if (try_skip_type_args())
                        for (std::size_t i = start; i < pos_; ++i)
                            receiver += tokens_[sig_[i]].text;
                }
                continue;
            }
            n.name = seg;
            advance();
            break;
        }
        n.receiver_type = receiver;
        if (accept(":")) {
            n.has_type_annotation = true;
            parse_type_ref();
        }
        if (accept("=")) {
            n.has_initializer = true;
            n.children.push_back(parse_expression());
        } else if (is_ident() && is("by")) {
            advance();
            n.has_delegate = true;
            n.children.push_back(parse_expression());
        }
        if (scope != Scope::Local)
            parse_accessors(n);
        // a `by`-delegated local declaration is still a property (Kotlin's
        // local delegated properties); plain locals are variables
        n.kind = (scope == Scope::Local && !n.has_delegate) ? NodeKind::VariableDecl
                                                            : NodeKind::PropertyDecl;
        finalize(n);
        return n;
    }

    void parse_accessors(SyntaxNode& prop) {
        for (;;) {
            std::size_t save = pos_;
            std::vector<std::string> amods;
            const auto& words = modifier_words();
            while (is_ident() && words.count(text()) &&
                   (text(1) == "get" || text(1) == "set")) {
                amods.push_back(std::string(text()));
                advance();
            }
            if (!is_ident() || (!is("get") && !is("set"))) {
                pos_ = save;
                return;
            }
            std::string_view after = text(1);
            bool has_body = after == "(" || after == "=";
            if (!has_body && amods.empty()) {
                pos_ = save;
                return; // bare `get` identifier is a normal expression
            }
            SyntaxNode acc = make(NodeKind::Other);
            acc.text = "accessor";
            acc.name = std::string(text());
            advance();
            attach_modifiers(acc, amods);
            if (is("(")) {
                skip_balanced("(", ")");
                if (accept(":"))
                    parse_type_ref();
                if (is("{"))
                    acc.children.push_back(parse_block());
                else if (accept("="))
                    acc.children.push_back(parse_expression());
            }
            finalize(acc);
            prop.children.push_back(std::move(acc));
        }
    }

    SyntaxNode parse_typealias(std::vector<std::string> mods) {
        SyntaxNode n = make(NodeKind::TypeAliasDecl);
        advance();
        attach_modifiers(n, mods);
        if (is_ident()) {
            n.name = std::string(text());
            advance();
        }
        if (is("<"))
            try_skip_type_args();
        if (accept("="))
            n.text = parse_type_ref();
        finalize(n);
        return n;
    }

    SyntaxNode parse_secondary_constructor(std::vector<std::string> mods) {
        SyntaxNode n = make(NodeKind::ConstructorDecl);
        n.text = "secondary";
        advance(); // constructor
        attach_modifiers(n, mods);
        if (is("("))
            parse_parameters(n, /*allow_properties=*/false);
        if (accept(":")) {
            // delegation call  this(...) / super(...)
            SyntaxNode del = make(NodeKind::Other);
            del.text = "ctor-delegation";
            if (is("this") || is("super")) {
                del.name = std::string(text());
                advance();
                if (is("("))
                    parse_value_arguments(del);
            }
            finalize(del);
            n.children.push_back(std::move(del));
        }
        if (is("{"))
            n.children.push_back(parse_block());
        finalize(n);
        return n;
    }

    // ---- statements ---------------------------------------------------------

    SyntaxNode parse_block() {
        SyntaxNode n = make(NodeKind::Block);
        if (!accept("{")) {
            finalize(n);
            return n;
        }
        ++depth_;
        while (!at_end() && !is("}")) {
            std::size_t before = pos_;
            parse_element(n, Scope::Local);
            if (pos_ == before) {
                append_other_token(n);
                ++degraded_;
            }
        }
        accept("}");
        --depth_;
        finalize(n);
        return n;
    }

    SyntaxNode parse_body_or_statement() {
        if (is("{"))
            return parse_block();
        SyntaxNode wrap = make(NodeKind::Block);
        std::size_t before = pos_;
        parse_element(wrap, Scope::Local);
        if (pos_ == before)
            append_other_token(wrap);
        finalize(wrap);
        return wrap;
    }

    void parse_statement(SyntaxNode& parent, Scope scope) {
        (void)scope;
        if (is("if")) {
            parent.children.push_back(parse_if());
            return;
        }
        if (is("when")) {
            parent.children.push_back(parse_when());
            return;
        }
        if (is("for")) {
            parent.children.push_back(parse_for());
            return;
        }
        if (is("while")) {
            SyntaxNode n = make(NodeKind::Other);
            n.text = "while";
            advance();
            if (accept("(")) {
                n.children.push_back(parse_expression());
                accept(")");
            }
            n.children.push_back(parse_body_or_statement());
            finalize(n);
            parent.children.push_back(std::move(n));
            return;
        }
        if (is("do")) {
            SyntaxNode n = make(NodeKind::Other);
            n.text = "do";
            advance();
            n.children.push_back(parse_body_or_statement());
            if (accept("while") && accept("(")) {
                n.children.push_back(parse_expression());
                accept(")");
            }
            finalize(n);
            parent.children.push_back(std::move(n));
            return;
        }
        if (is("try")) {
            parent.children.push_back(parse_try());
            return;
        }
        if (is("return") || is("throw") || is("break") || is("continue")) {
            SyntaxNode n = make(NodeKind::Other);
            n.text = std::string(text());
            int line = cur_line();
            advance();
            if (is("@") && same_line_as_prev()) {
                advance();
                if (is_ident())
                    advance();
            }
            if ((n.text == "return" || n.text == "throw") && !at_end() &&
                cur_line() == line && !is("}") && !is(")") && !is(";") && !is(","))
                n.children.push_back(parse_expression());
            finalize(n);
            parent.children.push_back(std::move(n));
            return;
        }
        if (is("{")) {
            parent.children.push_back(parse_lambda());
            return;
        }
        parent.children.push_back(parse_expression());
    }

    SyntaxNode parse_if() {
        SyntaxNode n = make(NodeKind::Other);
        n.text = "if";
        advance();
        if (accept("(")) {
            n.children.push_back(parse_expression());
            accept(")");
        }
        while (is(";"))
            advance();
        if (!is("else"))
            n.children.push_back(parse_body_or_statement());
        else
            n.children.push_back(make(NodeKind::Block));
        std::size_t save = pos_;
        while (is(";"))
            advance();
        if (accept("else"))
            n.children.push_back(parse_body_or_statement());
        else
            pos_ = save;
        finalize(n);
        return n;
    }

    SyntaxNode parse_for() {
        SyntaxNode n = make(NodeKind::Other);
        n.text = "for";
        advance();
        if (accept("(")) {
            skip_annotations_and_labels();
            accept("val") || accept("var");
            if (is("(")) { // destructuring loop variable
                SyntaxNode d = make(NodeKind::DestructuringDecl);
                advance();
                while (!at_end() && !is(")")) {
                    if (is_ident()) {
                        d.components.push_back(std::string(text()));
                        advance();
                        if (accept(":"))
                            parse_type_ref();
                    } else {
                        advance();
                    }
                    if (!accept(","))
                        break;
                }
                accept(")");
                finalize(d);
                n.children.push_back(std::move(d));
            } else if (is_ident()) {
                advance();
                if (accept(":"))
                    parse_type_ref();
            }
            accept("in");
            n.children.push_back(parse_expression());
            accept(")");
        }
        n.children.push_back(parse_body_or_statement());
        finalize(n);
        return n;
    }

    SyntaxNode parse_try() {
        SyntaxNode n = make(NodeKind::Other);
        n.text = "try";
        advance();
        if (is("{"))
            n.children.push_back(parse_block());
        while (is_ident() && is("catch")) {
            advance();
            skip_balanced("(", ")");
            if (is("{"))
                n.children.push_back(parse_block());
        }
        if (is_ident() && is("finally")) {
            advance();
            if (is("{"))
                n.children.push_back(parse_block());
        }
        finalize(n);
        return n;
    }

    SyntaxNode parse_when() {
        SyntaxNode n = make(NodeKind::WhenExpr);
        advance();
        if (accept("(")) {
            if (is("val") || is("var")) {
                std::vector<std::string> none;
                SyntaxNode subject = parse_property(none, Scope::Local);
                n.name = subject.name;
                n.children.push_back(std::move(subject));
            } else {
                SyntaxNode subject = parse_expression();
                if (subject.kind == NodeKind::Other && subject.text == "name")
                    n.name = subject.name;
                n.children.push_back(std::move(subject));
            }
            accept(")");
        }
        if (accept("{")) {
            ++depth_;
            while (!at_end() && !is("}")) {
                std::size_t before = pos_;
                SyntaxNode entry = make(NodeKind::Other);
                entry.text = "when-entry";
                if (accept("else")) {
                    // no condition
                } else {
                    do {
                        if (is("is") || is("!is")) {
                            bool positive = is("is");
                            advance();
                            parse_type_ref();
                            if (positive)
                                entry.is_check = true;
                        } else if (is("in") || is("!in")) {
                            advance();
                            entry.children.push_back(parse_expression());
                        } else {
                            entry.children.push_back(parse_expression());
                        }
                    } while (accept(","));
                }
                if (accept("->")) {
                    if (is("{"))
                        entry.children.push_back(parse_block());
                    else {
                        SyntaxNode body = make(NodeKind::Block);
                        std::size_t b = pos_;
                        parse_element(body, Scope::Local);
                        if (pos_ == b)
                            append_other_token(body);
                        finalize(body);
                        entry.children.push_back(std::move(body));
                    }
                }
                while (is(";"))
                    advance();
                finalize(entry);
                n.children.push_back(std::move(entry));
                if (pos_ == before) {
                    append_other_token(n);
                    ++degraded_;
                }
            }
            accept("}");
            --depth_;
        }
        finalize(n);
        return n;
    }

    // ---- expressions -----------------------------------------------------

    SyntaxNode parse_expression() {
        if (++depth_ > kMaxDepth) {
            --depth_;
            SyntaxNode n = make(NodeKind::Other);
            n.text = "depth-limit";
            advance();
            finalize(n);
            return n;
        }
        SyntaxNode n = parse_assignment();
        --depth_;
        return n;
    }

    bool binary_at(std::initializer_list<std::string_view> ops) const {
        for (auto op : ops)
            if (is(op))
                return true;
        return false;
    }

    SyntaxNode binary_node(std::string op, SyntaxNode lhs, SyntaxNode rhs) {
        SyntaxNode n;
        n.kind = NodeKind::BinaryOp;
        n.text = std::move(op);
        n.start_line = lhs.start_line;
        n.end_line = std::max(lhs.end_line, rhs.end_line);
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    SyntaxNode parse_assignment() {
        SyntaxNode lhs = parse_disjunction();
        if (binary_at({"=", "+=", "-=", "*=", "/=", "%="})) {
            std::string op(text());
            advance();
            SyntaxNode rhs = parse_assignment();
            return binary_node(std::move(op), std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    SyntaxNode parse_disjunction() {
        SyntaxNode lhs = parse_conjunction();
        while (is("||")) {
            advance();
            lhs = binary_node("||", std::move(lhs), parse_conjunction());
        }
        return lhs;
    }

    SyntaxNode parse_conjunction() {
        SyntaxNode lhs = parse_equality();
        while (is("&&")) {
            advance();
            lhs = binary_node("&&", std::move(lhs), parse_equality());
        }
        return lhs;
    }

    SyntaxNode parse_equality() {
        SyntaxNode lhs = parse_comparison();
        while (binary_at({"==", "!=", "===", "!=="})) {
            std::string op(text());
            advance();
            lhs = binary_node(std::move(op), std::move(lhs), parse_comparison());
        }
        return lhs;
    }

    SyntaxNode parse_comparison() {
        SyntaxNode lhs = parse_checks();
        while (binary_at({"<", ">", "<=", ">="})) {
            std::string op(text());
            advance();
            lhs = binary_node(std::move(op), std::move(lhs), parse_checks());
        }
        return lhs;
    }

    SyntaxNode parse_checks() {
        SyntaxNode lhs = parse_elvis();
        for (;;) {
            if (is("is") || is("!is")) {
                std::string op(text());
                advance();
                SyntaxNode rhs = make(NodeKind::Other);
                rhs.text = "type";
                rhs.name = parse_type_ref();
                finalize(rhs);
                lhs = binary_node(std::move(op), std::move(lhs), std::move(rhs));
            } else if (is("in") || is("!in")) {
                std::string op(text());
                advance();
                lhs = binary_node(std::move(op), std::move(lhs), parse_elvis());
            } else if (is("as")) {
                advance();
                std::string op = "as";
                if (is("?")) {
                    op = "as?";
                    advance();
                }
                SyntaxNode rhs = make(NodeKind::Other);
                rhs.text = "type";
                rhs.name = parse_type_ref();
                finalize(rhs);
                lhs = binary_node(std::move(op), std::move(lhs), std::move(rhs));
            } else {
                break;
            }
        }
        return lhs;
    }

    SyntaxNode parse_elvis() {
        SyntaxNode lhs = parse_infix_call();
        while (is("?:")) {
            advance();
            lhs = binary_node("?:", std::move(lhs), parse_infix_call());
        }
        return lhs;
    }

    bool starts_expression(std::size_t off) const {
        const Token& t = tok(off);
        switch (t.kind) {
        case TokenKind::Identifier:
        case TokenKind::Number:
        case TokenKind::StringLiteral:
            return true;
        case TokenKind::Keyword:
            return t.text == "this" || t.text == "super" || t.text == "null" ||
                   t.text == "true" || t.text == "false" || t.text == "object" ||
                   t.text == "if" || t.text == "when" || t.text == "try";
        case TokenKind::Operator:
            return t.text == "(" || t.text == "{" || t.text == "[" || t.text == "!" ||
                   t.text == "-" || t.text == "+" || t.text == "::";
        case TokenKind::Other:
            return !t.text.empty() && t.text[0] == '\'';
        default:
            return false;
        }
    }

    // named infix calls:  a until b, items zip other ...
    SyntaxNode parse_infix_call() {
        SyntaxNode lhs = parse_range();
        while (is_ident() && same_line_as_prev() && starts_expression(1) &&
               !modifier_words().count(text())) {
            std::string op(text());
            advance();
            lhs = binary_node(std::move(op), std::move(lhs), parse_range());
        }
        return lhs;
    }

    SyntaxNode parse_range() {
        SyntaxNode lhs = parse_additive();
        while (is("..") || is("..<")) {
            std::string op(text());
            advance();
            lhs = binary_node(std::move(op), std::move(lhs), parse_additive());
        }
        return lhs;
    }

    SyntaxNode parse_additive() {
        SyntaxNode lhs = parse_multiplicative();
        while ((is("+") || is("-")) && !at_end()) {
            std::string op(text());
            advance();
            lhs = binary_node(std::move(op), std::move(lhs), parse_multiplicative());
        }
        return lhs;
    }

    SyntaxNode parse_multiplicative() {
        SyntaxNode lhs = parse_prefix();
        while (binary_at({"*", "/", "%"})) {
            std::string op(text());
            advance();
            lhs = binary_node(std::move(op), std::move(lhs), parse_prefix());
        }
        return lhs;
    }

    SyntaxNode parse_prefix() {
        skip_annotations_and_labels();
        if (binary_at({"!", "-", "+", "++", "--"})) {
            SyntaxNode n = make(NodeKind::Other);
            n.text = "prefix" + std::string(text());
            advance();
            n.children.push_back(parse_prefix());
            finalize(n);
            return n;
        }
        if (is("*")) { // spread in argument position
            SyntaxNode n = make(NodeKind::Other);
            n.text = "spread";
            advance();
            n.children.push_back(parse_prefix());
            finalize(n);
            return n;
        }
        return parse_postfix();
    }

    SyntaxNode parse_postfix() {
        SyntaxNode cur = parse_primary();
        std::string last_name = cur.name;
        for (;;) {
            if (is(".") || is("?.")) {
                bool safe = is("?.");
                int line = cur_line();
                advance();
                std::string member;
                if (is_ident() || is("class")) {
                    member = std::string(text());
                    advance();
                }
                SyntaxNode n;
                n.kind = safe ? NodeKind::BinaryOp : NodeKind::Other;
                n.text = safe ? "?." : ".";
                n.name = member;
                n.start_line = std::min(cur.start_line, line);
                n.end_line = std::max(cur.end_line, line);
                n.children.push_back(std::move(cur));
                cur = std::move(n);
                last_name = member;
                continue;
            }
            if (is("::")) {
                advance();
                SyntaxNode n = make(NodeKind::Other);
                n.text = "::";
                if (is_ident() || is("class")) {
                    n.name = std::string(text());
                    advance();
                }
                n.start_line = std::min(n.start_line, cur.start_line);
                n.children.insert(n.children.begin(), std::move(cur));
                finalize(n);
                cur = std::move(n);
                continue;
            }
            if (is("<") && try_skip_type_args_for_call())
                continue;
            if (is("(") && same_line_as_prev()) {
                SyntaxNode call = make(NodeKind::CallExpr);
                call.name = last_name;
                call.start_line = std::min(call.start_line, cur.start_line);
                call.children.push_back(std::move(cur));
                parse_value_arguments(call);
                if (is("{") && same_line_as_prev())
                    call.children.push_back(parse_lambda());
                finalize(call);
                cur = std::move(call);
                continue;
            }
            if (is("{") && same_line_as_prev() && cur.kind != NodeKind::CallExpr &&
                (cur.kind == NodeKind::Other || cur.kind == NodeKind::BinaryOp) &&
                !last_name.empty()) {
                // trailing-lambda-only call:  items.forEach { ... }
                SyntaxNode call = make(NodeKind::CallExpr);
                call.name = last_name;
                call.start_line = std::min(call.start_line, cur.start_line);
                call.children.push_back(std::move(cur));
                call.children.push_back(parse_lambda());
                finalize(call);
                cur = std::move(call);
                continue;
            }
            if (is("{") && same_line_as_prev() && cur.kind == NodeKind::CallExpr &&
                cur.children.empty()) {
                cur.children.push_back(parse_lambda());
                continue;
            }
            if (is("!!")) {
                SyntaxNode n = make(NodeKind::UnaryPostfixOp);
                n.text = "!!";
                advance();
                n.start_line = std::min(n.start_line, cur.start_line);
                n.children.push_back(std::move(cur));
                finalize(n);
                cur = std::move(n);
                continue;
            }
            if ((is("++") || is("--")) && same_line_as_prev()) {
                SyntaxNode n = make(NodeKind::UnaryPostfixOp);
                n.text = std::string(text());
                advance();
                n.start_line = std::min(n.start_line, cur.start_line);
                n.children.push_back(std::move(cur));
                finalize(n);
                cur = std::move(n);
                continue;
            }
            if (is("[") && same_line_as_prev()) {
                SyntaxNode n = make(NodeKind::Other);
                n.text = "index";
                advance();
                n.start_line = std::min(n.start_line, cur.start_line);
                n.children.push_back(std::move(cur));
                ++depth_;
                while (!at_end() && !is("]")) {
                    n.children.push_back(parse_expression());
                    if (!accept(","))
                        break;
                }
                accept("]");
                --depth_;
                finalize(n);
                cur = std::move(n);
                continue;
            }
            break;
        }
        return cur;
    }

    bool try_skip_type_args_for_call() {
        std::size_t save = pos_;
        if (!try_skip_type_args())
            return false;
        if (is("(") || is("{") || is("::"))
            return true;
        pos_ = save;
        return false;
    }

    void parse_value_arguments(SyntaxNode& owner) {
        if (!accept("("))
            return;
        ++depth_;
        while (!at_end() && !is(")")) {
            SyntaxNode arg = make(NodeKind::CallArgument);
            if (is_ident() && is("=", 1) && text(2) != "=") {
                arg.named_arg = true;
                arg.name = std::string(text());
                advance();
                advance();
            }
            arg.children.push_back(parse_expression());
            finalize(arg);
            owner.children.push_back(std::move(arg));
            if (!accept(","))
                break;
        }
        accept(")");
        --depth_;
    }

    SyntaxNode parse_lambda() {
        SyntaxNode n = make(NodeKind::LambdaExpr);
        if (!accept("{")) {
            finalize(n);
            return n;
        }
        ++depth_;
        if (lambda_params_ahead()) {
            while (!at_end() && !is("->")) {
                if (is("(")) {
                    SyntaxNode d = make(NodeKind::DestructuringDecl);
                    advance();
                    while (!at_end() && !is(")")) {
                        if (is_ident()) {
                            d.components.push_back(std::string(text()));
                            advance();
                            if (accept(":"))
                                parse_type_ref();
                        } else {
                            advance();
                        }
                        if (!accept(","))
                            break;
                    }
                    accept(")");
                    finalize(d);
                    n.children.push_back(std::move(d));
                } else if (is_ident()) {
                    advance();
                    if (accept(":"))
                        parse_type_ref();
                } else {
                    advance();
                }
                accept(",");
            }
            accept("->");
        }
        while (!at_end() && !is("}")) {
            std::size_t before = pos_;
            parse_element(n, Scope::Local);
            if (pos_ == before) {
                append_other_token(n);
                ++degraded_;
            }
        }
        accept("}");
        --depth_;
        finalize(n);
        return n;
    }

    bool lambda_params_ahead() const {
        int paren = 0;
        std::size_t limit = std::min(sig_.size(), pos_ + 96);
        for (std::size_t scan = pos_; scan < limit; ++scan) {
            std::string_view t = tokens_[sig_[scan]].text;
            if (t == "(" || t == "[")
                ++paren;
            else if (t == ")" || t == "]")
                --paren;
            else if (t == "->" && paren == 0)
                return true;
            else if (t == "{" || t == "}" || t == ";")
                return false;
        }
        return false;
    }

    SyntaxNode parse_primary() {
        if (at_end())
            return make(NodeKind::Other);
        const Token& t = tok();
        if (t.kind == TokenKind::StringLiteral)
            return parse_string_literal();
        if (t.kind == TokenKind::Number) {
            SyntaxNode n = make(NodeKind::Other);
            n.text = "number";
            n.name = t.text;
            advance();
            finalize(n);
            return n;
        }
        if (is("(")) {
            SyntaxNode n = make(NodeKind::Other);
            n.text = "paren";
            advance();
            ++depth_;
            if (!is(")"))
                n.children.push_back(parse_expression());
            accept(")");
            --depth_;
            finalize(n);
            return n;
        }
        if (is("{"))
            return parse_lambda();
        if (is("if"))
            return parse_if();
        if (is("when"))
            return parse_when();
        if (is("try"))
            return parse_try();
        if (is("object")) {
            SyntaxNode n = make(NodeKind::ObjectDecl);
            n.anonymous = true;
            advance();
            if (accept(":"))
                parse_supertype_list(n);
            if (is("{"))
                parse_class_body(n);
            finalize(n);
            return n;
        }
        if (is("fun")) {
            std::vector<std::string> none;
            SyntaxNode n = parse_function(none, Scope::Local);
            n.anonymous = n.name.empty();
            return n;
        }
        if (is("throw") || is("return") || is("break") || is("continue")) {
            SyntaxNode wrap = make(NodeKind::Block);
            parse_statement(wrap, Scope::Local);
            finalize(wrap);
            if (wrap.children.size() == 1)
                return std::move(wrap.children.front());
            return wrap;
        }
        if (t.kind == TokenKind::Identifier || is("this") || is("super") ||
            is("null") || is("true") || is("false")) {
            SyntaxNode n = make(NodeKind::Other);
            n.text = "name";
            n.name = t.text;
            advance();
            if (n.name == "super" && is("<"))
                try_skip_type_args();
            finalize(n);
            return n;
        }
        if (is("::")) { // free callable reference  ::foo
            SyntaxNode n = make(NodeKind::Other);
            n.text = "::";
            advance();
            if (is_ident())
                advance();
            finalize(n);
            return n;
        }
        SyntaxNode n = make(NodeKind::Other);
        n.name = std::string(t.text);
        advance();
        finalize(n);
        return n;
    }

    // ---- string templates --------------------------------------------------

    SyntaxNode parse_string_literal() {
        const Token& t = tok();
        SyntaxNode n = make(NodeKind::StringLiteral);
        n.start_line = t.line;
        n.end_line = token_end_line(t);
        advance();
        bool raw = t.text.rfind("\"\"\"", 0) == 0;
        const std::string& s = t.text;
        std::size_t begin = raw ? 3 : 1;
        std::size_t end = s.size();
        if (raw) {
            if (end >= 6 && s.compare(end - 3, 3, "\"\"\"") == 0)
                end -= 3;
        } else if (end >= 2 && s.back() == '"') {
            end -= 1;
        }

        int line = t.line;
        int col = t.column + static_cast<int>(begin);
        auto bump = [&](char c) {
            if (c == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        };

        std::size_t i = begin;
        while (i < end) {
            char c = s[i];
            if (!raw && c == '\\' && i + 1 < end) {
                bump(s[i]);
                bump(s[i + 1]);
                i += 2;
                continue;
            }
            if (c == '$' && i + 1 < end) {
                char nxt = s[i + 1];
                if (nxt == '{') {
                    std::size_t close = find_hole_end(s, i + 2, end);
                    SyntaxNode entry = make(NodeKind::StringTemplateEntry);
                    entry.text = "expr";
                    entry.start_line = line;
                    int inner_line = line;
                    int inner_col = col + 2;
                    if (close != std::string::npos) {
                        std::string inner = s.substr(i + 2, close - (i + 2));
                        parse_template_fragment(inner, inner_line, inner_col, entry);
                        for (std::size_t k = i; k < close + 1 && k < end; ++k)
                            bump(s[k]);
                        i = close + 1;
                    } else {
                        for (std::size_t k = i; k < end; ++k)
                            bump(s[k]);
                        i = end;
                    }
                    finalize(entry);
                    entry.end_line = std::max(entry.end_line, line);
                    n.children.push_back(std::move(entry));
                    continue;
                }
                if (std::isalpha(static_cast<unsigned char>(nxt)) || nxt == '_') {
                    std::size_t j = i + 1;
                    while (j < end && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                                       s[j] == '_'))
                        ++j;
                    SyntaxNode entry = make(NodeKind::StringTemplateEntry);
                    entry.text = "simple";
                    entry.name = s.substr(i + 1, j - (i + 1));
                    entry.start_line = line;
                    entry.end_line = line;
                    n.children.push_back(std::move(entry));
                    for (std::size_t k = i; k < j; ++k)
                        bump(s[k]);
                    i = j;
                    continue;
                }
            }
            bump(c);
            ++i;
        }
        for (auto& c : n.children)
            n.end_line = std::max(n.end_line, c.end_line);
        return n;
    }

    // Matches the lexer's hole scan: nested strings, chars, comments, braces.
    static std::size_t find_hole_end(const std::string& s, std::size_t from,
                                     std::size_t end) {
        int depth = 1;
        std::size_t i = from;
        while (i < end) {
            if (s.compare(i, 3, "\"\"\"") == 0) {
                i = skip_raw_inner(s, i + 3, end);
                continue;
            }
            char c = s[i];
            if (c == '"') {
                i = skip_escaped_inner(s, i + 1, end);
                continue;
            }
            if (c == '\'') {
                ++i;
                while (i < end && s[i] != '\'' && s[i] != '\n') {
                    if (s[i] == '\\')
                        ++i;
                    ++i;
                }
                if (i < end && s[i] == '\'')
                    ++i;
                continue;
            }
            if (c == '/' && i + 1 < end && s[i + 1] == '/') {
                while (i < end && s[i] != '\n')
                    ++i;
                continue;
            }
            if (c == '/' && i + 1 < end && s[i + 1] == '*') {
                int cd = 1;
                i += 2;
                while (i < end && cd > 0) {
                    if (s.compare(i, 2, "/*") == 0) {
                        ++cd;
                        i += 2;
                    } else if (s.compare(i, 2, "*/") == 0) {
                        --cd;
                        i += 2;
                    } else {
                        ++i;
                    }
                }
                continue;
            }
            if (c == '{')
                ++depth;
            else if (c == '}') {
                --depth;
                if (depth == 0)
                    return i;
            }
            ++i;
        }
        return std::string::npos;
    }

    static std::size_t skip_raw_inner(const std::string& s, std::size_t i,
                                      std::size_t end) {
        while (i < end) {
            if (s[i] == '$' && i + 1 < end && s[i + 1] == '{') {
                std::size_t close = find_hole_end(s, i + 2, end);
                if (close == std::string::npos)
                    return end;
                i = close + 1;
                continue;
            }
            if (s[i] == '"') {
                std::size_t run = 0;
                while (i + run < end && s[i + run] == '"')
                    ++run;
                i += run;
                if (run >= 3)
                    return i;
                continue;
            }
            ++i;
        }
        return end;
    }

    static std::size_t skip_escaped_inner(const std::string& s, std::size_t i,
                                          std::size_t end) {
        while (i < end) {
            char c = s[i];
            if (c == '\\' && i + 1 < end) {
                i += 2;
                continue;
            }
            if (c == '"')
                return i + 1;
            if (c == '\n')
                return i;
            if (c == '$' && i + 1 < end && s[i + 1] == '{') {
                std::size_t close = find_hole_end(s, i + 2, end);
                if (close == std::string::npos)
                    return end;
                i = close + 1;
                continue;
            }
            ++i;
        }
        return end;
    }

    void parse_template_fragment(const std::string& fragment, int line, int col,
                                 SyntaxNode& entry) {
        std::vector<Token> inner;
        try {
            inner = tokenize(fragment);
        } catch (const Error&) {
            return; // fragment of a valid file is valid; defensive only
        }
        for (auto& it : inner) {
            if (it.line == 1)
                it.column += col - 1;
            it.line += line - 1;
        }
        Parser sub(inner, line, col);
        SyntaxNode frag = sub.parse_file(Scope::Local);
        degraded_ += sub.degraded();
        for (auto& child : frag.children)
            entry.children.push_back(std::move(child));
    }
};

} // namespace

SourceTree parse(std::vector<Token> tokens, const std::string& path) {
    SourceTree tree;
    tree.path = path;
    tree.tokens = std::move(tokens);
    tree.token_count = tree.tokens.size();
    Parser parser(tree.tokens, 1, 1);
    tree.root = parser.parse_file(Scope::TopLevel);
    tree.degraded_regions = parser.degraded();
    int max_line = 1;
    std::string all;
    for (const auto& t : tree.tokens)
        max_line = std::max(max_line, token_end_line(t));
    if (tree.tokens.empty())
        tree.physical_lines = 0;
    else {
        const Token& last = tree.tokens.back();
        bool ends_nl = !last.text.empty() && last.text.back() == '\n';
        tree.physical_lines = ends_nl ? max_line - 1 : max_line;
        // a file whose final byte is '\n' has content only through the
        // preceding line; token_end_line already moved past it
        if (tree.physical_lines < 1)
            tree.physical_lines = 1;
    }
    return tree;
}

SourceTree parse_source(std::string_view source, const std::string& path) {
    SourceTree tree = parse(tokenize(source, path), path);
    tree.physical_lines = physical_line_count(source);
    return tree;
}

int count_lloc(const SourceTree& tree) {
    std::set<int> lines;
    for (const auto& t : tree.tokens) {
        if (t.is_trivia())
            continue;
        int from = t.line;
        int to = token_end_line(t);
        for (int l = from; l <= to; ++l)
            lines.insert(l);
    }
    return static_cast<int>(lines.size());
}

} // namespace featrend
