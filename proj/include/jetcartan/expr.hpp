#pragma once

#include "jetcartan/rational.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace jetcartan {

// Interned variable name. Comparison by id; name lookup via the global table.
class Symbol {
public:
    static Symbol intern(std::string_view name);
    const std::string& name() const;
    std::uint32_t id() const { return id_; }

    friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
    friend bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }
    friend bool operator<(Symbol a, Symbol b) { return a.id_ < b.id_; }

private:
    explicit Symbol(std::uint32_t id) : id_(id) {}
    std::uint32_t id_;
    friend struct SymbolTable;
};

enum class NodeKind : std::uint8_t {
    Constant,
    Variable,
    Sum,
    Product,
    Quotient,
    IntPow,
    Negation,
    Function,
};

enum class Fn1 : std::uint8_t { Sin, Cos, Exp, Log, Sqrt };

struct ExprNode;

// Immutable symbolic scalar expression. Shared, hash-consed nodes; value
// semantics throughout. Cheap local rewrites happen at construction only.
class Expr {
public:
    Expr(); // zero

    static Expr constant(const ComplexRational& c);
    static Expr rational(std::int64_t num, std::int64_t den = 1);
    static Expr integer(std::int64_t n);
    static Expr imaginary_unit();
    static Expr variable(Symbol s);
    static Expr variable(std::string_view name);

    NodeKind kind() const;
    const ComplexRational& constant_value() const;  // Constant nodes
    Symbol variable_symbol() const;                 // Variable nodes
    const std::vector<Expr>& children() const;
    int power_exponent() const;                     // IntPow nodes
    Fn1 function_tag() const;                       // Function nodes

    bool is_zero() const;
    bool is_one() const;
    bool is_constant() const { return kind() == NodeKind::Constant; }

    // Free variables, sorted by symbol id (shared, do not mutate).
    const std::vector<Symbol>& free_variables() const;
    bool depends_on(Symbol s) const;

    std::size_t node_id() const;
    bool same_node(const Expr& o) const { return node_.get() == o.node_.get(); }

    std::string str() const;

    const ExprNode* raw() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
    friend struct ExprBuilder;
};

// Construction (with local simplification: 0+e, 1*e, 0*e, constant folding,
// e^0, e^1, -(-e), flattening of nested sums/products).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr sum(const std::vector<Expr>& terms);
Expr product(const std::vector<Expr>& factors);

inline Expr operator+(const Expr& a, std::int64_t b) { return a + Expr::integer(b); }
inline Expr operator-(const Expr& a, std::int64_t b) { return a - Expr::integer(b); }
inline Expr operator*(const Expr& a, std::int64_t b) { return a * Expr::integer(b); }
inline Expr operator/(const Expr& a, std::int64_t b) { return a / Expr::integer(b); }
inline Expr operator+(std::int64_t a, const Expr& b) { return Expr::integer(a) + b; }
inline Expr operator-(std::int64_t a, const Expr& b) { return Expr::integer(a) - b; }
inline Expr operator*(std::int64_t a, const Expr& b) { return Expr::integer(a) * b; }
inline Expr operator/(std::int64_t a, const Expr& b) { return Expr::integer(a) / b; }

// Exact partial derivative; closed over the node set.
Expr diff(const Expr& e, Symbol v);
Expr diff(const Expr& e, Symbol v, int order);

// Capture-free substitution. The map variant substitutes simultaneously.
Expr subst(const Expr& e, Symbol v, const Expr& replacement);
Expr subst(const Expr& e, const std::map<Symbol, Expr>& replacements);

} // namespace jetcartan
