#pragma once

#include "fracexp/expr.hpp"
#include "fracexp/functional.hpp"
#include "fracexp/hurst.hpp"
#include "fracexp/taylor.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace fracexp {

/// A_{v,r} F = (1/2)(int_0^T + int_0^r) D_u D_v F phi_H(u, v) du as an expression in v.
/// The u-integral is a kernel_int node; it evaluates in closed form whenever
/// D_u D_v F is piecewise polynomial in u.
Expr apply_A(const Expr& F, const std::string& v, double r, double T, HurstParam H);

/// A_{v_i,r} ... A_{v_1,r} F frozen at r, in the free variables v1..vi.
Expr iterated_A(const Expr& F, double r, double T, HurstParam H, int i);

struct ATerm {
    int order = 0;
    Expr integrand;  // frozen, in v1..v_order; empty product for order 0
    double value = 0.0;
    double error = 0.0;
};

struct QuadPlan {
    enum class Strategy {
        Auto,           // exact when F = c exp(G) with G linear, else tensor-simplex
        Exact,          // require the closed form; UnsupportedNode otherwise
        TensorSimplex,  // iterated 1-D quadrature over r <= v1 <= ... <= vi <= T
    };
    Strategy strategy = Strategy::Auto;
    /// 0: adaptive Gauss-Kronrod per level; n > 0: n-point Gauss-Legendre per panel.
    int points_per_dim = 0;
    /// Extra panel splits in addition to the times found in F.
    std::vector<double> breakpoints;
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;
};

/// Highest order for which non-factorizing functionals are supported.
inline constexpr int kMaxGenericOrder = 3;

/// The frozen-path exponential series of E~[F | F_r]:
/// term i = int_{r <= v1 <= ... <= vi <= T} (A_{v_i,r} ... A_{v_1,r} F)(gamma^r) dv.
/// Symbolic work happens once in the constructor; evaluate() is per path.
class ExpSeriesEngine {
public:
    ExpSeriesEngine(const Expr& F, double r, double T, HurstParam H, int order, QuadPlan quad = {});
    ~ExpSeriesEngine();
    ExpSeriesEngine(ExpSeriesEngine&&) noexcept;
    ExpSeriesEngine& operator=(ExpSeriesEngine&&) noexcept;

    /// path may be null when r = 0 or F is deterministic after freezing.
    SeriesResult evaluate(const PathView* path) const;
    std::vector<ATerm> terms(const PathView* path) const;

    /// True when the closed form for c exp(G) with deterministic D G is used.
    bool factorized() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// diagnostics hold the quadrature error estimate per term.
SeriesResult exp_series(const Expr& F, double r, double T, HurstParam H, int order, const PathView* path,
                        const QuadPlan& quad = {});

/// ||sup |(D^m F)(gamma^r)| ||_{L^2} for derivative order m, sup over the midpoint
/// lattice in [0,T]^m. Lattices above 4096 points are replaced by their diagonal
/// and seeded random lattice points.
SupEstimator frozen_sup_estimator(const Expr& F, double r, double T, HurstParam H, long n_paths = 200,
                                  int points_per_dim = 4, unsigned long long seed = 42);

/// Partial sums over i = 1..i_max of (T^{2H} - r^{2H})^i / (2^i i!) sup(2i).
std::vector<double> assumption_b_sequence(const Expr& F, double r, double T, HurstParam H, int i_max,
                                          const SupEstimator& sup);

/// The three ordered-simplex integrals of the fourth-order term of E[exp(-int_0^T B_s^2 ds)].
struct CirFourthOrder {
    std::array<double, 3> quadrature{};
    std::array<double, 3> closed_form{};
    std::array<double, 3> error{};  // quadrature error estimates
    bool converged = true;

    double quadrature_sum() const { return quadrature[0] + quadrature[1] + quadrature[2]; }
    double closed_form_sum() const { return closed_form[0] + closed_form[1] + closed_form[2]; }
};

CirFourthOrder cir_fourth_order_integral(double T, HurstParam H);

/// Closed forms only (no quadrature).
std::array<double, 3> cir_fourth_order_closed_form(double T, HurstParam H);

}  // namespace fracexp
