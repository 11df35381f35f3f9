#include "vsa/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <map>

namespace vsa {

const char* to_string(FuncId f) {
    switch (f) {
        case FuncId::Exp: return "exp";
        case FuncId::Sin: return "sin";
        case FuncId::Cos: return "cos";
        case FuncId::Tan: return "tan";
        case FuncId::Asin: return "asin";
        case FuncId::Acos: return "acos";
        case FuncId::Atan: return "atan";
        case FuncId::Sqrt: return "sqrt";
        case FuncId::Log: return "log";
        case FuncId::Abs: return "abs";
        case FuncId::Pow: return "pow";
    }
    return "?";
}

namespace {

struct Token {
    enum class Type { Number, Ident, Op, LParen, RParen, Comma, End };
    Type type = Type::End;
    double number = 0.0;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& peek() const { return cur_; }
    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        cur_ = Token{};
        cur_.pos = i_;
        if (i_ >= s_.size()) {
            cur_.type = Token::Type::End;
            cur_.text = "end of input";
            return;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
            std::size_t start = i_;
            while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
            if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
                std::size_t save = i_;
                ++i_;
                if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
                if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
                } else {
                    i_ = save;  // 'e' belongs to an identifier or is stray
                }
            }
            cur_.type = Token::Type::Number;
            cur_.text = s_.substr(start, i_ - start);
            cur_.number = std::strtod(cur_.text.c_str(), nullptr);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
                ++i_;
            cur_.type = Token::Type::Ident;
            cur_.text = s_.substr(start, i_ - start);
            return;
        }
        ++i_;
        cur_.text = std::string(1, c);
        switch (c) {
            case '(': cur_.type = Token::Type::LParen; break;
            case ')': cur_.type = Token::Type::RParen; break;
            case ',': cur_.type = Token::Type::Comma; break;
            case '+': case '-': case '*': case '/': case '^':
                cur_.type = Token::Type::Op;
                break;
            default:
                throw ParseError(cur_.pos, "a token", "'" + cur_.text + "'");
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
    Token cur_;
};

const std::map<std::string, std::pair<FuncId, int>>& function_table() {
    static const std::map<std::string, std::pair<FuncId, int>> t = {
        {"exp", {FuncId::Exp, 1}},   {"sin", {FuncId::Sin, 1}},   {"cos", {FuncId::Cos, 1}},
        {"tan", {FuncId::Tan, 1}},   {"asin", {FuncId::Asin, 1}}, {"acos", {FuncId::Acos, 1}},
        {"atan", {FuncId::Atan, 1}}, {"sqrt", {FuncId::Sqrt, 1}}, {"log", {FuncId::Log, 1}},
        {"abs", {FuncId::Abs, 1}},   {"pow", {FuncId::Pow, 2}},
    };
    return t;
}

class Parser {
  public:
    Parser(const std::string& s, const std::vector<std::string>& vars) : lex_(s), vars_(vars) {}

    Expr::NodePtr run() {
        Expr::NodePtr e = sum();
        const Token& t = lex_.peek();
        if (t.type != Token::Type::End)
            throw ParseError(t.pos, "end of input or an operator", describe(t));
        return e;
    }

  private:
    static std::string describe(const Token& t) {
        if (t.type == Token::Type::End) return "end of input";
        return "'" + t.text + "'";
    }

    static Expr::NodePtr make(Expr::Kind k, std::vector<Expr::NodePtr> kids) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = k;
        n->kids = std::move(kids);
        return n;
    }

    Expr::NodePtr sum() {
        Expr::NodePtr e = term();
        while (lex_.peek().type == Token::Type::Op &&
               (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            std::string op = lex_.take().text;
            Expr::NodePtr r = term();
            e = make(op == "+" ? Expr::Kind::Add : Expr::Kind::Sub, {e, r});
        }
        return e;
    }

    Expr::NodePtr term() {
        Expr::NodePtr e = unary();
        while (lex_.peek().type == Token::Type::Op &&
               (lex_.peek().text == "*" || lex_.peek().text == "/")) {
            std::string op = lex_.take().text;
            Expr::NodePtr r = unary();
            e = make(op == "*" ? Expr::Kind::Mul : Expr::Kind::Div, {e, r});
        }
        return e;
    }

    Expr::NodePtr unary() {
        if (lex_.peek().type == Token::Type::Op && lex_.peek().text == "-") {
            lex_.take();
            return make(Expr::Kind::Neg, {unary()});
        }
        return power();
    }

    Expr::NodePtr power() {
        Expr::NodePtr base = atom();
        if (lex_.peek().type == Token::Type::Op && lex_.peek().text == "^") {
            lex_.take();
            // right-associative; binds tighter than unary minus on the left
            return make(Expr::Kind::PowOp, {base, unary()});
        }
        return base;
    }

    Expr::NodePtr atom() {
        Token t = lex_.take();
        if (t.type == Token::Type::Number) {
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Kind::Number;
            n->number = t.number;
            return n;
        }
        if (t.type == Token::Type::LParen) {
            Expr::NodePtr e = sum();
            Token close = lex_.take();
            if (close.type != Token::Type::RParen)
                throw ParseError(close.pos, "')'", describe(close));
            return e;
        }
        if (t.type == Token::Type::Ident) {
            if (t.text == "pi" || t.text == "e") {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Kind::Number;
                n->number = t.text == "pi" ? 3.14159265358979323846 : 2.71828182845904523536;
                return n;
            }
            auto fn = function_table().find(t.text);
            if (fn != function_table().end()) {
                Token open = lex_.take();
                if (open.type != Token::Type::LParen)
                    throw ParseError(open.pos, "'(' after function name", describe(open));
                std::vector<Expr::NodePtr> args;
                args.push_back(sum());
                while (lex_.peek().type == Token::Type::Comma) {
                    lex_.take();
                    args.push_back(sum());
                }
                Token close = lex_.take();
                if (close.type != Token::Type::RParen)
                    throw ParseError(close.pos, "')'", describe(close));
                if (static_cast<int>(args.size()) != fn->second.second)
                    throw ParseError(t.pos,
                                     std::to_string(fn->second.second) + " argument(s) to " + t.text,
                                     std::to_string(args.size()) + " argument(s)");
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Kind::Call;
                n->func = fn->second.first;
                n->kids = std::move(args);
                return n;
            }
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (vars_[i] == t.text) {
                    auto n = std::make_shared<Expr::Node>();
                    n->kind = Expr::Kind::Var;
                    n->var = static_cast<int>(i);
                    n->var_name = t.text;
                    return n;
                }
            }
            throw ParseError(t.pos, "a declared variable or function", "'" + t.text + "'");
        }
        throw ParseError(t.pos, "a number, variable, function or '('", describe(t));
    }

    Lexer lex_;
    const std::vector<std::string>& vars_;
};

int precedence(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub: return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div: return 2;
        case Expr::Kind::Neg: return 3;
        case Expr::Kind::PowOp: return 4;
        default: return 5;
    }
}

void print_node(const Expr::Node& n, std::string& out, int parent_prec) {
    int prec = precedence(n.kind);
    bool parens = prec < parent_prec;
    if (parens) out += '(';
    switch (n.kind) {
        case Expr::Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            break;
        }
        case Expr::Kind::Var: out += n.var_name; break;
        case Expr::Kind::Add:
            print_node(*n.kids[0], out, prec);
            out += '+';
            print_node(*n.kids[1], out, prec + 1);
            break;
        case Expr::Kind::Sub:
            print_node(*n.kids[0], out, prec);
            out += '-';
            print_node(*n.kids[1], out, prec + 1);
            break;
        case Expr::Kind::Mul:
            print_node(*n.kids[0], out, prec);
            out += '*';
            print_node(*n.kids[1], out, prec + 1);
            break;
        case Expr::Kind::Div:
            print_node(*n.kids[0], out, prec);
            out += '/';
            print_node(*n.kids[1], out, prec + 1);
            break;
        case Expr::Kind::Neg:
            out += '-';
            print_node(*n.kids[0], out, prec + 1);
            break;
        case Expr::Kind::PowOp:
            print_node(*n.kids[0], out, prec + 1);
            out += '^';
            print_node(*n.kids[1], out, prec);
            break;
        case Expr::Kind::Call:
            out += to_string(n.func);
            out += '(';
            for (std::size_t i = 0; i < n.kids.size(); ++i) {
                if (i) out += ',';
                print_node(*n.kids[i], out, 0);
            }
            out += ')';
            break;
    }
    if (parens) out += ')';
}

bool same_node(const Expr::Node& a, const Expr::Node& b) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
    if (a.kind == Expr::Kind::Number && a.number != b.number) return false;
    if (a.kind == Expr::Kind::Var && (a.var != b.var || a.var_name != b.var_name)) return false;
    if (a.kind == Expr::Kind::Call && a.func != b.func) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!same_node(*a.kids[i], *b.kids[i])) return false;
    return true;
}

}  // namespace

Expr Expr::parse(const std::string& text, const std::vector<std::string>& vars) {
    Parser p(text, vars);
    Expr e;
    e.root_ = p.run();
    e.vars_ = vars;
    e.text_ = text;
    return e;
}

std::size_t Expr::count(const NodePtr& n) {
    std::size_t c = 1;
    for (const auto& k : n->kids) c += count(k);
    return c;
}

std::size_t Expr::node_count() const { return root_ ? count(root_) : 0; }

std::string Expr::to_string() const {
    if (!root_) return "";
    std::string out;
    print_node(*root_, out, 0);
    return out;
}

bool Expr::same_structure(const Expr& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return same_node(*root_, *other.root_);
}

}  // namespace vsa
