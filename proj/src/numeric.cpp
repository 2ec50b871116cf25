#include "jetcartan/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace jetcartan {

namespace {

struct EvalCtx {
    const Assignment& values;
    std::unordered_map<std::size_t, CDouble> memo;
};

CDouble eval_rec(const Expr& e, EvalCtx& ctx) {
    const auto key = e.node_id();
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;

    CDouble result;
    switch (e.kind()) {
        case NodeKind::Constant: {
            const auto& c = e.constant_value();
            result = CDouble(c.re.to_double(), c.im.to_double());
            break;
        }
        case NodeKind::Variable: {
            auto f = ctx.values.find(e.variable_symbol());
            if (f == ctx.values.end())
                throw EvalError("missing variable: " + e.variable_symbol().name());
            result = f->second;
            break;
        }
        case NodeKind::Sum: {
            result = CDouble(0.0);
            for (const auto& k : e.children()) result += eval_rec(k, ctx);
            break;
        }
        case NodeKind::Product: {
            result = CDouble(1.0);
            for (const auto& k : e.children()) result *= eval_rec(k, ctx);
            break;
        }
        case NodeKind::Quotient: {
            CDouble n = eval_rec(e.children()[0], ctx);
            CDouble d = eval_rec(e.children()[1], ctx);
            if (d == CDouble(0.0)) throw EvalError("division by zero");
            result = n / d;
            break;
        }
        case NodeKind::IntPow: {
            CDouble b = eval_rec(e.children()[0], ctx);
            int k = e.power_exponent();
            if (k < 0) {
                if (b == CDouble(0.0)) throw EvalError("division by zero in power");
                b = CDouble(1.0) / b;
                k = -k;
            }
            CDouble acc(1.0);
            while (k) {
                if (k & 1) acc *= b;
                b *= b;
                k >>= 1;
            }
            result = acc;
            break;
        }
        case NodeKind::Negation:
            result = -eval_rec(e.children()[0], ctx);
            break;
        case NodeKind::Function: {
            CDouble u = eval_rec(e.children()[0], ctx);
            switch (e.function_tag()) {
                case Fn1::Sin: result = std::sin(u); break;
                case Fn1::Cos: result = std::cos(u); break;
                case Fn1::Exp: result = std::exp(u); break;
                case Fn1::Log:
                    if (u == CDouble(0.0)) throw EvalError("log of zero");
                    result = std::log(u);
                    break;
                case Fn1::Sqrt: result = std::sqrt(u); break;
            }
            break;
        }
        default:
            throw EvalError("unknown node kind");
    }
    ctx.memo.emplace(key, result);
    return result;
}

// splitmix64: platform-stable uniform doubles in [0,1)
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

} // namespace

CDouble eval(const Expr& e, const Assignment& a) {
    EvalCtx ctx{a, {}};
    return eval_rec(e, ctx);
}

PointSampler::PointSampler(const Domain& domain, std::uint64_t seed)
    : state_(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull) {
    vars_.assign(domain.box.begin(), domain.box.end());
    std::sort(vars_.begin(), vars_.end(), [](const auto& a, const auto& b) {
        return a.first.name() < b.first.name();
    });
}

Assignment PointSampler::next() {
    Assignment a;
    for (const auto& [sym, iv] : vars_) {
        const double u = unit_double(state_);
        a[sym] = CDouble(iv.first + u * (iv.second - iv.first), 0.0);
    }
    return a;
}

EqualityReport equal_numeric(const std::vector<Expr>& lhs, const std::vector<Expr>& rhs,
                             const Domain& domain, int trials, double tol,
                             std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("equal_numeric: trials must be >= 1");
    if (lhs.size() != rhs.size())
        throw std::invalid_argument("equal_numeric: size mismatch");

    for (const auto& e : lhs)
        for (Symbol s : e.free_variables())
            if (!domain.covers(s)) throw std::invalid_argument("equal_numeric: domain missing " + s.name());
    for (const auto& e : rhs)
        for (Symbol s : e.free_variables())
            if (!domain.covers(s)) throw std::invalid_argument("equal_numeric: domain missing " + s.name());

    EqualityReport report;
    report.pass = true;
    report.trials = trials;
    PointSampler sampler(domain, seed);
    for (int t = 0; t < trials; ++t) {
        Assignment point = sampler.next();
        for (std::size_t k = 0; k < lhs.size(); ++k) {
            CDouble a, b;
            try {
                a = eval(lhs[k], point);
                b = eval(rhs[k], point);
            } catch (const EvalError& err) {
                report.pass = false;
                report.failure = err.what();
                report.worst_point = point;
                report.worst_rel_error = std::numeric_limits<double>::infinity();
                return report;
            }
            const double scale = 1.0 + std::max(std::abs(a), std::abs(b));
            const double rel = std::abs(a - b) / scale;
            if (rel > report.worst_rel_error) {
                report.worst_rel_error = rel;
                report.worst_point = point;
            }
        }
    }
    report.pass = report.worst_rel_error <= tol;
    return report;
}

EqualityReport equal_numeric(const Expr& e1, const Expr& e2, const Domain& domain,
                             int trials, double tol, std::uint64_t seed) {
    return equal_numeric(std::vector<Expr>{e1}, std::vector<Expr>{e2}, domain, trials, tol, seed);
}

CDouble finite_difference(const Expr& e, Symbol v, const Assignment& at, double h) {
    if (!(h > 0)) throw std::invalid_argument("finite_difference: h must be positive");
    Assignment hi = at, lo = at;
    hi[v] += h;
    lo[v] -= h;
    return (eval(e, hi) - eval(e, lo)) / CDouble(2.0 * h);
}

} // namespace jetcartan
