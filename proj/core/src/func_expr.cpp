#include "opkernel/func_expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace opkernel {

struct FuncExpr::Node {
    enum class Kind { Const, Var, Indicator, Sin, Cos, Exp, Pow, Add, Sub, Mul, Scale };

    Kind kind;
    double value = 0.0;  // Const payload, Scale factor
    int exponent = 0;    // Pow payload
    Axis axis = Axis::T;
    LebesgueSet set;  // Indicator payload
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = FuncExpr::Node;
using Kind = Node::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(double c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = c;
    return n;
}

NodePtr make_var(Axis axis) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->axis = axis;
    return n;
}

NodePtr make_indicator(LebesgueSet set, Axis axis) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Indicator;
    n->set = std::move(set);
    n->axis = axis;
    return n;
}

NodePtr make_unary(Kind kind, NodePtr child) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(child);
    return n;
}

NodePtr make_pow(NodePtr child, int exponent) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pow;
    n->a = std::move(child);
    n->exponent = exponent;
    return n;
}

bool is_const(const NodePtr& n, double* out = nullptr) {
    if (n->kind != Kind::Const) return false;
    if (out) *out = n->value;
    return true;
}

NodePtr make_scale(double c, NodePtr child) {
    double cv = 0.0;
    if (is_const(child, &cv)) return make_const(c * cv);
    if (child->kind == Kind::Scale) return make_scale(c * child->value, child->a);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Scale;
    n->value = c;
    n->a = std::move(child);
    return n;
}

NodePtr make_binary(Kind kind, NodePtr a, NodePtr b) {
    double ca = 0.0, cb = 0.0;
    const bool fa = is_const(a, &ca);
    const bool fb = is_const(b, &cb);
    if (fa && fb) {
        switch (kind) {
            case Kind::Add: return make_const(ca + cb);
            case Kind::Sub: return make_const(ca - cb);
            case Kind::Mul: return make_const(ca * cb);
            default: break;
        }
    }
    if (kind == Kind::Mul && fa) return make_scale(ca, std::move(b));
    if (kind == Kind::Mul && fb) return make_scale(cb, std::move(a));
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

double eval_node(const Node& n, double t, double s) {
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Var: return n.axis == Axis::T ? t : s;
        case Kind::Indicator: return n.set.contains(n.axis == Axis::T ? t : s) ? 1.0 : 0.0;
        case Kind::Sin: return std::sin(eval_node(*n.a, t, s));
        case Kind::Cos: return std::cos(eval_node(*n.a, t, s));
        case Kind::Exp: return std::exp(eval_node(*n.a, t, s));
        case Kind::Pow: {
            double base = eval_node(*n.a, t, s);
            double r = 1.0;
            for (int i = 0; i < n.exponent; ++i) r *= base;
            return r;
        }
        case Kind::Add: return eval_node(*n.a, t, s) + eval_node(*n.b, t, s);
        case Kind::Sub: return eval_node(*n.a, t, s) - eval_node(*n.b, t, s);
        case Kind::Mul: return eval_node(*n.a, t, s) * eval_node(*n.b, t, s);
        case Kind::Scale: return n.value * eval_node(*n.a, t, s);
    }
    return 0.0;
}

bool node_has_indicator(const Node& n) {
    if (n.kind == Kind::Indicator) return true;
    if (n.a && node_has_indicator(*n.a)) return true;
    if (n.b && node_has_indicator(*n.b)) return true;
    return false;
}

bool node_uses_axis(const Node& n, Axis axis) {
    switch (n.kind) {
        case Kind::Const: return false;
        case Kind::Var:
        case Kind::Indicator: return n.axis == axis;
        default:
            if (n.a && node_uses_axis(*n.a, axis)) return true;
            if (n.b && node_uses_axis(*n.b, axis)) return true;
            return false;
    }
}

void collect_breakpoints(const Node& n, Axis axis, std::vector<double>& out) {
    if (n.kind == Kind::Indicator && n.axis == axis) {
        for (const auto& iv : n.set.intervals()) {
            out.push_back(iv.lo);
            out.push_back(iv.hi);
        }
    }
    if (n.a) collect_breakpoints(*n.a, axis, out);
    if (n.b) collect_breakpoints(*n.b, axis, out);
}

bool node_equal(const Node& x, const Node& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Kind::Const: return x.value == y.value;
        case Kind::Scale:
            if (x.value != y.value) return false;
            break;
        case Kind::Pow:
            if (x.exponent != y.exponent) return false;
            break;
        case Kind::Var: return x.axis == y.axis;
        case Kind::Indicator: return x.axis == y.axis && x.set == y.set;
        default: break;
    }
    if (static_cast<bool>(x.a) != static_cast<bool>(y.a)) return false;
    if (static_cast<bool>(x.b) != static_cast<bool>(y.b)) return false;
    if (x.a && !node_equal(*x.a, *y.a)) return false;
    if (x.b && !node_equal(*x.b, *y.b)) return false;
    return true;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_node(const Node& n, std::ostream& os) {
    switch (n.kind) {
        case Kind::Const: os << format_number(n.value); break;
        case Kind::Var: os << (n.axis == Axis::T ? "t" : "s"); break;
        case Kind::Indicator: {
            // multi-interval indicators print as a sum of single ones
            const auto& ivs = n.set.intervals();
            if (ivs.size() != 1) os << "(";
            for (std::size_t i = 0; i < ivs.size(); ++i) {
                if (i) os << "+";
                os << "ind(" << format_number(ivs[i].lo) << "," << format_number(ivs[i].hi);
                if (n.axis == Axis::S) os << ",s";
                os << ")";
            }
            if (ivs.size() != 1) os << ")";
            break;
        }
        case Kind::Sin:
            os << "sin(";
            print_node(*n.a, os);
            os << ")";
            break;
        case Kind::Cos:
            os << "cos(";
            print_node(*n.a, os);
            os << ")";
            break;
        case Kind::Exp:
            os << "exp(";
            print_node(*n.a, os);
            os << ")";
            break;
        case Kind::Pow:
            os << "(";
            print_node(*n.a, os);
            os << ")^" << n.exponent;
            break;
        case Kind::Add:
            os << "(";
            print_node(*n.a, os);
            os << "+";
            print_node(*n.b, os);
            os << ")";
            break;
        case Kind::Sub:
            os << "(";
            print_node(*n.a, os);
            os << "-";
            print_node(*n.b, os);
            os << ")";
            break;
        case Kind::Mul:
            os << "(";
            print_node(*n.a, os);
            os << "*";
            print_node(*n.b, os);
            os << ")";
            break;
        case Kind::Scale:
            os << "(" << format_number(n.value) << "*";
            print_node(*n.a, os);
            os << ")";
            break;
    }
}

// Recursive-descent parser.  Precedence: ^ binds tightest, then unary minus,
// then * and /, then + and -.  `/` demands a constant-folded nonzero divisor.
class Parser {
  public:
    Parser(std::string_view text, bool allow_s) : text_(text), allow_s_(allow_s) {}

    NodePtr run() {
        skip_ws();
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    std::string_view text_;
    bool allow_s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "syntax error at position " << pos_ << ": " << msg;
        throw ParseError(os.str(), pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr parse_sum() {
        NodePtr e = parse_product();
        while (true) {
            if (accept('+')) {
                e = make_binary(Kind::Add, e, parse_product());
            } else if (accept('-')) {
                e = make_binary(Kind::Sub, e, parse_product());
            } else {
                return e;
            }
        }
    }

    NodePtr parse_product() {
        NodePtr e = parse_unary();
        while (true) {
            if (accept('*')) {
                e = make_binary(Kind::Mul, e, parse_unary());
            } else if (peek('/')) {
                const std::size_t at = pos_;
                ++pos_;
                NodePtr d = parse_unary();
                double c = 0.0;
                if (!is_const(d, &c)) {
                    pos_ = at;
                    fail("division is only allowed by a numeric constant");
                }
                if (c == 0.0) {
                    pos_ = at;
                    fail("division by zero");
                }
                e = make_binary(Kind::Mul, e, make_const(1.0 / c));
            } else {
                return e;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_scale(-1.0, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) {
            skip_ws();
            int n = parse_uint("power exponent must be a non-negative integer");
            double c = 0.0;
            if (is_const(base, &c)) {
                double r = 1.0;
                for (int i = 0; i < n; ++i) r *= c;
                return make_const(r);
            }
            return make_pow(base, n);
        }
        return base;
    }

    int parse_uint(const char* err) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail(err);
        return std::stoi(std::string(text_.substr(start, pos_ - start)));
    }

    double parse_number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;
            }
        }
        if (pos_ == start) fail("expected a number");
        const std::string snum(text_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            const double v = std::stod(snum, &used);
            if (used != snum.size()) {
                pos_ = start;
                fail("malformed number");
            }
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number");
        }
    }

    double parse_signed_number() {
        skip_ws();
        if (accept('-')) return -parse_number();
        return parse_number();
    }

    std::string parse_ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return make_const(parse_number());
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t at = pos_;
            std::string id = parse_ident();
            if (id == "t") return make_var(Axis::T);
            if (id == "s") {
                if (!allow_s_) {
                    pos_ = at;
                    fail("variable 's' is not allowed in a univariate expression");
                }
                return make_var(Axis::S);
            }
            if (id == "sin" || id == "cos" || id == "exp") {
                expect('(');
                NodePtr arg = parse_sum();
                expect(')');
                const Kind k = id == "sin" ? Kind::Sin : id == "cos" ? Kind::Cos : Kind::Exp;
                double cv = 0.0;
                if (is_const(arg, &cv)) {
                    return make_const(k == Kind::Sin   ? std::sin(cv)
                                      : k == Kind::Cos ? std::cos(cv)
                                                       : std::exp(cv));
                }
                return make_unary(k, arg);
            }
            if (id == "ind") {
                expect('(');
                double lo = parse_signed_number();
                expect(',');
                double hi = parse_signed_number();
                Axis axis = Axis::T;
                if (accept(',')) {
                    std::string var = parse_ident();
                    if (var == "t") {
                        axis = Axis::T;
                    } else if (var == "s" && allow_s_) {
                        axis = Axis::S;
                    } else {
                        fail("indicator variable must be 't' or 's'");
                    }
                }
                expect(')');
                if (lo > hi) fail("indicator requires lo <= hi");
                return make_indicator(LebesgueSet::interval(lo, hi), axis);
            }
            pos_ = at;
            fail("unknown identifier '" + id + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

FuncExpr::FuncExpr() : root_(make_const(0.0)) {}
FuncExpr::FuncExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

FuncExpr FuncExpr::parse(std::string_view text) { return FuncExpr(Parser(text, false).run()); }

FuncExpr FuncExpr::parse_bivariate(std::string_view text) {
    return FuncExpr(Parser(text, true).run());
}

FuncExpr FuncExpr::constant(double c) { return FuncExpr(make_const(c)); }
FuncExpr FuncExpr::var(Axis axis) { return FuncExpr(make_var(axis)); }

FuncExpr FuncExpr::indicator(const LebesgueSet& set, Axis axis) {
    return FuncExpr(make_indicator(set, axis));
}

FuncExpr FuncExpr::operator+(const FuncExpr& rhs) const {
    return FuncExpr(make_binary(Kind::Add, root_, rhs.root_));
}

FuncExpr FuncExpr::operator-(const FuncExpr& rhs) const {
    return FuncExpr(make_binary(Kind::Sub, root_, rhs.root_));
}

FuncExpr FuncExpr::operator*(const FuncExpr& rhs) const {
    return FuncExpr(make_binary(Kind::Mul, root_, rhs.root_));
}

FuncExpr FuncExpr::scaled(double c) const { return FuncExpr(make_scale(c, root_)); }

FuncExpr FuncExpr::pow(int n) const {
    if (n < 0) throw std::invalid_argument("pow exponent must be >= 0");
    return FuncExpr(make_pow(root_, n));
}

FuncExpr sin(const FuncExpr& f) { return FuncExpr(make_unary(Kind::Sin, f.root_)); }
FuncExpr cos(const FuncExpr& f) { return FuncExpr(make_unary(Kind::Cos, f.root_)); }
FuncExpr exp(const FuncExpr& f) { return FuncExpr(make_unary(Kind::Exp, f.root_)); }

double FuncExpr::operator()(double t) const { return eval_node(*root_, t, 0.0); }
double FuncExpr::operator()(double t, double s) const { return eval_node(*root_, t, s); }

bool FuncExpr::uses_axis(Axis axis) const { return node_uses_axis(*root_, axis); }

bool FuncExpr::has_jumps() const { return node_has_indicator(*root_); }

std::vector<double> FuncExpr::breakpoints(double lo, double hi, Axis axis) const {
    if (std::isinf(lo) || std::isinf(hi)) {
        throw std::invalid_argument("breakpoints window must be finite");
    }
    std::vector<double> pts;
    collect_breakpoints(*root_, axis, pts);
    std::erase_if(pts, [&](double x) { return x < lo || x > hi; });
    pts.push_back(lo);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double x : pts) {
        if (out.empty() || x - out.back() > 1e-14) out.push_back(x);
    }
    return out;
}

std::string FuncExpr::to_string() const {
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

bool FuncExpr::operator==(const FuncExpr& rhs) const { return node_equal(*root_, *rhs.root_); }

SimpleFunction::SimpleFunction(OrderedPartition partition, std::vector<double> values)
    : partition_(std::move(partition)), values_(std::move(values)) {
    if (values_.size() != partition_.size()) {
        throw std::invalid_argument("one value per partition cell required");
    }
}

double SimpleFunction::operator()(double t) const {
    const std::size_t k = partition_.cell_of(t);
    return k < values_.size() ? values_[k] : 0.0;
}

FuncExpr SimpleFunction::to_expr() const {
    FuncExpr sum = FuncExpr::constant(0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        sum = sum + FuncExpr::indicator(partition_.cells()[k]).scaled(values_[k]);
    }
    return sum;
}

}  // namespace opkernel
