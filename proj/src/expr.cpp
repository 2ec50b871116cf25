#include "jetcartan/expr.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace jetcartan {

// ---------------------------------------------------------------- symbols

struct SymbolTable {
    std::mutex mu;
    std::unordered_map<std::string, std::uint32_t> by_name;
    std::deque<std::string> names; // deque: stable references for name()

    static SymbolTable& instance() {
        static SymbolTable t;
        return t;
    }
    static Symbol make(std::uint32_t id) { return Symbol(id); }
};

Symbol Symbol::intern(std::string_view name) {
    auto& t = SymbolTable::instance();
    std::lock_guard<std::mutex> lock(t.mu);
    auto it = t.by_name.find(std::string(name));
    if (it != t.by_name.end()) return Symbol(it->second);
    const auto id = static_cast<std::uint32_t>(t.names.size());
    t.names.emplace_back(name);
    t.by_name.emplace(t.names.back(), id);
    return Symbol(id);
}

const std::string& Symbol::name() const {
    auto& t = SymbolTable::instance();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.names[id_];
}

// ------------------------------------------------------------------ nodes

struct ExprNode {
    NodeKind kind;
    Fn1 fn = Fn1::Sin;
    int expo = 0;
    ComplexRational value;
    std::uint32_t sym = 0;
    std::vector<Expr> kids;
    std::uint64_t id = 0;
    std::size_t hash = 0;
    std::shared_ptr<const std::vector<Symbol>> free_vars;
};

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

std::size_t node_hash(NodeKind k, Fn1 fn, int expo, const ComplexRational& val,
                      std::uint32_t sym, const std::vector<Expr>& kids) {
    std::size_t h = static_cast<std::size_t>(k) * 1315423911u;
    h = hash_mix(h, static_cast<std::size_t>(fn));
    h = hash_mix(h, static_cast<std::size_t>(expo));
    h = hash_mix(h, static_cast<std::size_t>(val.re.num()));
    h = hash_mix(h, static_cast<std::size_t>(val.re.den()));
    h = hash_mix(h, static_cast<std::size_t>(val.im.num()));
    h = hash_mix(h, static_cast<std::size_t>(val.im.den()));
    h = hash_mix(h, sym);
    for (const auto& kid : kids) h = hash_mix(h, kid.raw()->hash);
    return h;
}

bool node_equal(const ExprNode& n, NodeKind k, Fn1 fn, int expo,
                const ComplexRational& val, std::uint32_t sym,
                const std::vector<Expr>& kids) {
    if (n.kind != k || n.fn != fn || n.expo != expo || n.sym != sym) return false;
    if (!(n.value == val)) return false;
    if (n.kids.size() != kids.size()) return false;
    for (std::size_t i = 0; i < kids.size(); ++i)
        if (n.kids[i].raw() != kids[i].raw()) return false;
    return true;
}

struct ConsTable {
    std::mutex mu;
    std::unordered_multimap<std::size_t, std::weak_ptr<const ExprNode>> table;
    std::atomic<std::uint64_t> next_id{1};

    static ConsTable& instance() {
        static ConsTable t;
        return t;
    }
};

std::shared_ptr<const std::vector<Symbol>> merge_free_vars(const std::vector<Expr>& kids) {
    static const auto empty = std::make_shared<const std::vector<Symbol>>();
    if (kids.empty()) return empty;
    if (kids.size() == 1) return kids[0].raw()->free_vars;
    std::vector<Symbol> acc = *kids[0].raw()->free_vars;
    std::vector<Symbol> tmp;
    for (std::size_t i = 1; i < kids.size(); ++i) {
        const auto& other = *kids[i].raw()->free_vars;
        if (other.empty()) continue;
        tmp.clear();
        std::set_union(acc.begin(), acc.end(), other.begin(), other.end(), std::back_inserter(tmp));
        acc.swap(tmp);
    }
    return std::make_shared<const std::vector<Symbol>>(std::move(acc));
}

} // namespace

struct ExprBuilder {
    static Expr make(NodeKind k, Fn1 fn, int expo, const ComplexRational& val,
                     std::uint32_t sym, std::vector<Expr> kids) {
        auto& t = ConsTable::instance();
        const std::size_t h = node_hash(k, fn, expo, val, sym, kids);
        std::lock_guard<std::mutex> lock(t.mu);
        auto range = t.table.equal_range(h);
        for (auto it = range.first; it != range.second; ++it) {
            if (auto existing = it->second.lock()) {
                if (node_equal(*existing, k, fn, expo, val, sym, kids))
                    return Expr(existing);
            }
        }
        auto node = std::make_shared<ExprNode>();
        node->kind = k;
        node->fn = fn;
        node->expo = expo;
        node->value = val;
        node->sym = sym;
        node->kids = std::move(kids);
        node->id = t.next_id.fetch_add(1);
        node->hash = h;
        if (k == NodeKind::Variable) {
            node->free_vars = std::make_shared<const std::vector<Symbol>>(
                std::vector<Symbol>{SymbolTable::make(sym)});
        } else {
            node->free_vars = merge_free_vars(node->kids);
        }
        t.table.emplace(h, node);
        return Expr(node);
    }
};

// ------------------------------------------------------------- accessors

namespace {

Expr make_constant(const ComplexRational& c) {
    return ExprBuilder::make(NodeKind::Constant, Fn1::Sin, 0, c, 0, {});
}
} // namespace

Expr::Expr() : node_(Expr::constant(ComplexRational(Rational(0))).node_) {}

Expr Expr::constant(const ComplexRational& c) { return make_constant(c); }
Expr Expr::rational(std::int64_t num, std::int64_t den) {
    return make_constant(ComplexRational(Rational(num, den)));
}
Expr Expr::integer(std::int64_t n) { return make_constant(ComplexRational(Rational(n))); }
Expr Expr::imaginary_unit() {
    return make_constant(ComplexRational(Rational(0), Rational(1)));
}
Expr Expr::variable(Symbol s) {
    return ExprBuilder::make(NodeKind::Variable, Fn1::Sin, 0, ComplexRational(), s.id(), {});
}
Expr Expr::variable(std::string_view name) { return variable(Symbol::intern(name)); }

NodeKind Expr::kind() const { return node_->kind; }
const ComplexRational& Expr::constant_value() const { return node_->value; }
Symbol Expr::variable_symbol() const { return SymbolTable::make(node_->sym); }
const std::vector<Expr>& Expr::children() const { return node_->kids; }
int Expr::power_exponent() const { return node_->expo; }
Fn1 Expr::function_tag() const { return node_->fn; }

bool Expr::is_zero() const {
    return node_->kind == NodeKind::Constant && node_->value.is_zero();
}
bool Expr::is_one() const {
    return node_->kind == NodeKind::Constant && node_->value.is_one();
}
const std::vector<Symbol>& Expr::free_variables() const { return *node_->free_vars; }
bool Expr::depends_on(Symbol s) const {
    const auto& fv = *node_->free_vars;
    return std::binary_search(fv.begin(), fv.end(), s);
}
std::size_t Expr::node_id() const { return node_->id; }

// --------------------------------------------------------- construction

namespace {

bool as_const(const Expr& e, ComplexRational& out) {
    if (e.kind() != NodeKind::Constant) return false;
    out = e.constant_value();
    return true;
}

} // namespace

Expr sum(const std::vector<Expr>& terms) {
    std::vector<Expr> flat;
    ComplexRational cacc{Rational(0)};
    bool fold_ok = true;
    std::vector<ComplexRational> unfolded;
    for (const auto& t : terms) {
        if (t.kind() == NodeKind::Sum) {
            for (const auto& kid : t.children()) {
                ComplexRational c;
                if (as_const(kid, c)) {
                    if (fold_ok) {
                        auto r = ComplexRational::checked_add(cacc, c);
                        if (r) { cacc = *r; continue; }
                        fold_ok = false;
                    }
                    flat.push_back(kid);
                } else flat.push_back(kid);
            }
        } else {
            ComplexRational c;
            if (as_const(t, c)) {
                if (fold_ok) {
                    auto r = ComplexRational::checked_add(cacc, c);
                    if (r) { cacc = *r; continue; }
                    fold_ok = false;
                }
                flat.push_back(t);
            } else flat.push_back(t);
        }
    }
    // cancel exact t / -t pairs
    {
        std::vector<bool> dead(flat.size(), false);
        std::unordered_multimap<const ExprNode*, std::size_t> positives;
        for (std::size_t k = 0; k < flat.size(); ++k)
            if (flat[k].kind() != NodeKind::Negation) positives.emplace(flat[k].raw(), k);
        for (std::size_t k = 0; k < flat.size(); ++k) {
            if (dead[k] || flat[k].kind() != NodeKind::Negation) continue;
            auto range = positives.equal_range(flat[k].children()[0].raw());
            for (auto it = range.first; it != range.second; ++it) {
                if (!dead[it->second]) {
                    dead[it->second] = true;
                    dead[k] = true;
                    break;
                }
            }
        }
        std::vector<Expr> kept;
        kept.reserve(flat.size());
        for (std::size_t k = 0; k < flat.size(); ++k)
            if (!dead[k]) kept.push_back(flat[k]);
        flat.swap(kept);
    }
    if (!cacc.is_zero()) flat.push_back(Expr::constant(cacc));
    if (flat.empty()) return Expr::integer(0);
    if (flat.size() == 1) return flat[0];
    return ExprBuilder::make(NodeKind::Sum, Fn1::Sin, 0, ComplexRational(), 0, std::move(flat));
}

Expr product(const std::vector<Expr>& factors) {
    std::vector<Expr> flat;
    ComplexRational cacc{Rational(1)};
    bool fold_ok = true;
    auto absorb = [&](const Expr& f) {
        ComplexRational c;
        if (as_const(f, c)) {
            if (fold_ok) {
                auto r = ComplexRational::checked_mul(cacc, c);
                if (r) { cacc = *r; return; }
                fold_ok = false;
            }
            flat.push_back(f);
        } else flat.push_back(f);
    };
    for (const auto& f : factors) {
        if (f.is_zero()) return Expr::integer(0);
        if (f.kind() == NodeKind::Product) {
            for (const auto& kid : f.children()) absorb(kid);
        } else absorb(f);
    }
    if (fold_ok && cacc.is_zero()) return Expr::integer(0);
    if (!cacc.is_one()) flat.insert(flat.begin(), Expr::constant(cacc));
    if (flat.empty()) return Expr::integer(1);
    if (flat.size() == 1) return flat[0];
    return ExprBuilder::make(NodeKind::Product, Fn1::Sin, 0, ComplexRational(), 0, std::move(flat));
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return sum({a, b});
}

Expr operator-(const Expr& a) {
    if (a.kind() == NodeKind::Constant) return Expr::constant(-a.constant_value());
    if (a.kind() == NodeKind::Negation) return a.children()[0];
    return ExprBuilder::make(NodeKind::Negation, Fn1::Sin, 0, ComplexRational(), 0, {a});
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    return sum({a, -b});
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr::integer(0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    return product({a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_one()) return a;
    if (a.is_zero() && !b.is_zero()) return Expr::integer(0);
    ComplexRational ca, cb;
    if (as_const(a, ca) && as_const(b, cb)) {
        auto r = ComplexRational::checked_div(ca, cb);
        if (r) return Expr::constant(*r);
    }
    return ExprBuilder::make(NodeKind::Quotient, Fn1::Sin, 0, ComplexRational(), 0, {a, b});
}

Expr pow(const Expr& base, int exponent) {
    if (exponent == 0) return Expr::integer(1);
    if (exponent == 1) return base;
    ComplexRational c;
    if (as_const(base, c) && exponent > 0 && exponent <= 8) {
        ComplexRational acc{Rational(1)};
        bool ok = true;
        for (int k = 0; k < exponent; ++k) {
            auto r = ComplexRational::checked_mul(acc, c);
            if (!r) { ok = false; break; }
            acc = *r;
        }
        if (ok) return Expr::constant(acc);
    }
    return ExprBuilder::make(NodeKind::IntPow, Fn1::Sin, exponent, ComplexRational(), 0, {base});
}

namespace {
Expr make_fn(Fn1 fn, const Expr& a) {
    // fold a few exact cases
    ComplexRational c;
    if (as_const(a, c) && c.is_real()) {
        switch (fn) {
            case Fn1::Sin:
                if (c.is_zero()) return Expr::integer(0);
                break;
            case Fn1::Cos:
                if (c.is_zero()) return Expr::integer(1);
                break;
            case Fn1::Exp:
                if (c.is_zero()) return Expr::integer(1);
                break;
            case Fn1::Log:
                if (c.is_one()) return Expr::integer(0);
                break;
            case Fn1::Sqrt: {
                auto r = c.re.exact_sqrt();
                if (r) return Expr::constant(ComplexRational(*r));
                break;
            }
        }
    }
    return ExprBuilder::make(NodeKind::Function, fn, 0, ComplexRational(), 0, {a});
}
} // namespace

Expr sin(const Expr& a) { return make_fn(Fn1::Sin, a); }
Expr cos(const Expr& a) { return make_fn(Fn1::Cos, a); }
Expr exp(const Expr& a) { return make_fn(Fn1::Exp, a); }
Expr log(const Expr& a) { return make_fn(Fn1::Log, a); }
Expr sqrt(const Expr& a) { return make_fn(Fn1::Sqrt, a); }

// ------------------------------------------------------------------ diff

namespace {

struct DiffCache {
    std::mutex mu;
    std::unordered_map<std::uint64_t, Expr> memo; // key = node_id * K + sym
    static DiffCache& instance() {
        static DiffCache c;
        return c;
    }
};

} // namespace

Expr diff(const Expr& e, Symbol v) {
    if (!e.depends_on(v)) return Expr::integer(0);
    auto& cache = DiffCache::instance();
    const std::uint64_t key = e.node_id() * 0x100000000ull + v.id();
    {
        std::lock_guard<std::mutex> lock(cache.mu);
        auto it = cache.memo.find(key);
        if (it != cache.memo.end()) return it->second;
    }
    Expr result;
    switch (e.kind()) {
        case NodeKind::Constant:
            result = Expr::integer(0);
            break;
        case NodeKind::Variable:
            result = (e.variable_symbol() == v) ? Expr::integer(1) : Expr::integer(0);
            break;
        case NodeKind::Sum: {
            std::vector<Expr> terms;
            for (const auto& kid : e.children()) {
                Expr d = diff(kid, v);
                if (!d.is_zero()) terms.push_back(d);
            }
            result = sum(terms);
            break;
        }
        case NodeKind::Product: {
            const auto& kids = e.children();
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                if (!kids[i].depends_on(v)) continue;
                std::vector<Expr> factors;
                for (std::size_t j = 0; j < kids.size(); ++j)
                    factors.push_back(i == j ? diff(kids[j], v) : kids[j]);
                terms.push_back(product(factors));
            }
            result = sum(terms);
            break;
        }
        case NodeKind::Quotient: {
            const Expr& n = e.children()[0];
            const Expr& d = e.children()[1];
            result = (diff(n, v) * d - n * diff(d, v)) / pow(d, 2);
            break;
        }
        case NodeKind::IntPow: {
            const Expr& b = e.children()[0];
            const int k = e.power_exponent();
            result = Expr::integer(k) * pow(b, k - 1) * diff(b, v);
            break;
        }
        case NodeKind::Negation:
            result = -diff(e.children()[0], v);
            break;
        case NodeKind::Function: {
            const Expr& u = e.children()[0];
            Expr du = diff(u, v);
            switch (e.function_tag()) {
                case Fn1::Sin: result = cos(u) * du; break;
                case Fn1::Cos: result = -(sin(u) * du); break;
                case Fn1::Exp: result = e * du; break;
                case Fn1::Log: result = du / u; break;
                case Fn1::Sqrt: result = du / (Expr::integer(2) * e); break;
            }
            break;
        }
    }
    std::lock_guard<std::mutex> lock(cache.mu);
    cache.memo.emplace(key, result);
    return result;
}

Expr diff(const Expr& e, Symbol v, int order) {
    Expr r = e;
    for (int k = 0; k < order; ++k) r = diff(r, v);
    return r;
}

// ----------------------------------------------------------------- subst

namespace {

Expr subst_rec(const Expr& e, const std::map<Symbol, Expr>& repl,
               std::unordered_map<const ExprNode*, Expr>& memo) {
    bool touches = false;
    for (const auto& [s, r] : repl) {
        if (e.depends_on(s)) { touches = true; break; }
    }
    if (!touches) return e;
    auto it = memo.find(e.raw());
    if (it != memo.end()) return it->second;

    Expr result;
    switch (e.kind()) {
        case NodeKind::Constant:
            result = e;
            break;
        case NodeKind::Variable: {
            auto f = repl.find(e.variable_symbol());
            result = (f != repl.end()) ? f->second : e;
            break;
        }
        case NodeKind::Sum: {
            std::vector<Expr> kids;
            kids.reserve(e.children().size());
            for (const auto& k : e.children()) kids.push_back(subst_rec(k, repl, memo));
            result = sum(kids);
            break;
        }
        case NodeKind::Product: {
            std::vector<Expr> kids;
            kids.reserve(e.children().size());
            for (const auto& k : e.children()) kids.push_back(subst_rec(k, repl, memo));
            result = product(kids);
            break;
        }
        case NodeKind::Quotient:
            result = subst_rec(e.children()[0], repl, memo) / subst_rec(e.children()[1], repl, memo);
            break;
        case NodeKind::IntPow:
            result = pow(subst_rec(e.children()[0], repl, memo), e.power_exponent());
            break;
        case NodeKind::Negation:
            result = -subst_rec(e.children()[0], repl, memo);
            break;
        case NodeKind::Function: {
            Expr u = subst_rec(e.children()[0], repl, memo);
            switch (e.function_tag()) {
                case Fn1::Sin: result = sin(u); break;
                case Fn1::Cos: result = cos(u); break;
                case Fn1::Exp: result = exp(u); break;
                case Fn1::Log: result = log(u); break;
                case Fn1::Sqrt: result = sqrt(u); break;
            }
            break;
        }
    }
    memo.emplace(e.raw(), result);
    return result;
}

} // namespace

Expr subst(const Expr& e, const std::map<Symbol, Expr>& replacements) {
    if (replacements.empty()) return e;
    std::unordered_map<const ExprNode*, Expr> memo;
    return subst_rec(e, replacements, memo);
}

Expr subst(const Expr& e, Symbol v, const Expr& replacement) {
    std::map<Symbol, Expr> m;
    m.emplace(v, replacement);
    return subst(e, m);
}

// -------------------------------------------------------------- printing

namespace {

int precedence(const Expr& e) {
    switch (e.kind()) {
        case NodeKind::Sum: return 1;
        case NodeKind::Negation: return 2;
        case NodeKind::Product:
        case NodeKind::Quotient: return 3;
        case NodeKind::IntPow: return 4;
        default: return 5;
    }
}

void print_rec(std::ostream& os, const Expr& e, int parent_prec);

void print_paren(std::ostream& os, const Expr& e, int parent_prec) {
    const int p = precedence(e);
    if (p < parent_prec) {
        os << '(';
        print_rec(os, e, 0);
        os << ')';
    } else {
        print_rec(os, e, parent_prec);
    }
}

void print_constant(std::ostream& os, const ComplexRational& c, int parent_prec) {
    const bool has_re = !c.re.is_zero();
    const bool has_im = !c.im.is_zero();
    if (!has_im) {
        if (c.re.num() < 0 || !c.re.is_integer()) {
            // negative or fractional literals parenthesized inside products
            if (parent_prec >= 3) { os << '(' << c.re.str() << ')'; return; }
        }
        os << c.re.str();
        return;
    }
    std::ostringstream tmp;
    if (has_re) tmp << c.re.str();
    if (has_im) {
        if (has_re && c.im.num() > 0) tmp << '+';
        if (c.im.is_one()) tmp << "i";
        else if ((-c.im).is_one()) tmp << "-i";
        else tmp << c.im.str() << "*i";
    }
    if (has_re || c.im.num() < 0 || !c.im.is_one()) os << '(' << tmp.str() << ')';
    else os << tmp.str();
}

void print_rec(std::ostream& os, const Expr& e, int parent_prec) {
    switch (e.kind()) {
        case NodeKind::Constant:
            print_constant(os, e.constant_value(), parent_prec);
            break;
        case NodeKind::Variable:
            os << e.variable_symbol().name();
            break;
        case NodeKind::Sum: {
            bool first = true;
            for (const auto& k : e.children()) {
                if (!first) {
                    if (k.kind() == NodeKind::Negation) {
                        os << " - ";
                        print_paren(os, k.children()[0], 2);
                        first = false;
                        continue;
                    }
                    os << " + ";
                }
                print_paren(os, k, first ? 1 : 2);
                first = false;
            }
            break;
        }
        case NodeKind::Product: {
            bool first = true;
            for (const auto& k : e.children()) {
                if (!first) os << "*";
                print_paren(os, k, 3);
                first = false;
            }
            break;
        }
        case NodeKind::Quotient:
            print_paren(os, e.children()[0], 3);
            os << "/";
            print_paren(os, e.children()[1], 4);
            break;
        case NodeKind::IntPow:
            print_paren(os, e.children()[0], 5);
            os << "^";
            if (e.power_exponent() < 0) os << '(' << e.power_exponent() << ')';
            else os << e.power_exponent();
            break;
        case NodeKind::Negation:
            os << "-";
            print_paren(os, e.children()[0], 3);
            break;
        case NodeKind::Function: {
            switch (e.function_tag()) {
                case Fn1::Sin: os << "sin"; break;
                case Fn1::Cos: os << "cos"; break;
                case Fn1::Exp: os << "exp"; break;
                case Fn1::Log: os << "log"; break;
                case Fn1::Sqrt: os << "sqrt"; break;
            }
            os << '(';
            print_rec(os, e.children()[0], 0);
            os << ')';
            break;
        }
    }
}

} // namespace

std::string Expr::str() const {
    std::ostringstream os;
    print_rec(os, *this, 0);
    return os.str();
}

} // namespace jetcartan
