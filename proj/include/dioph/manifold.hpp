#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dioph/common.hpp"
#include "dioph/poly.hpp"

namespace dioph {

// Multivariate polynomial in d variables, sparse term list.
class SparsePoly {
  public:
    struct Term {
        MultiIndex exp;
        double coeff;
    };

    SparsePoly() : d_(0) {}
    explicit SparsePoly(int d) : d_(d) {}
    SparsePoly(int d, std::vector<Term> terms) : d_(d), terms_(std::move(terms)) {
        for (auto& t : terms_)
            if (static_cast<int>(t.exp.size()) != d_)
                throw std::invalid_argument("SparsePoly: exponent arity mismatch");
        prune();
    }

    static SparsePoly monomial(int d, const MultiIndex& exp, double coeff = 1.0) {
        return SparsePoly(d, {{exp, coeff}});
    }
    static SparsePoly variable(int d, int axis) {
        MultiIndex e(d, 0);
        e[axis] = 1;
        return monomial(d, e);
    }
    // Univariate, ascending-degree dense coefficients.
    static SparsePoly from_dense_1d(const std::vector<double>& coeffs) {
        std::vector<Term> ts;
        for (size_t k = 0; k < coeffs.size(); ++k)
            if (coeffs[k] != 0.0) ts.push_back({{static_cast<int>(k)}, coeffs[k]});
        return SparsePoly(1, std::move(ts));
    }

    int arity() const { return d_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    double eval(const Vec& x) const {
        double s = 0.0;
        for (const auto& t : terms_) {
            double m = t.coeff;
            for (int j = 0; j < d_; ++j)
                for (int k = 0; k < t.exp[j]; ++k) m *= x[j];
            s += m;
        }
        return s;
    }

    SparsePoly derivative(int axis) const {
        std::vector<Term> out;
        for (const auto& t : terms_) {
            if (t.exp[axis] == 0) continue;
            Term nt = t;
            nt.coeff *= t.exp[axis];
            nt.exp[axis] -= 1;
            out.push_back(std::move(nt));
        }
        return SparsePoly(d_, std::move(out));
    }

    SparsePoly partial(const MultiIndex& beta) const {
        SparsePoly p = *this;
        for (int j = 0; j < d_; ++j)
            for (int k = 0; k < beta[j]; ++k) p = p.derivative(j);
        return p;
    }

    // Univariate restriction t -> p(x + t * e_axis), exact binomial expansion.
    Poly restrict_axis(const Vec& x, int axis) const {
        int deg = 0;
        for (const auto& t : terms_) deg = std::max(deg, t.exp[axis]);
        std::vector<double> out(deg + 1, 0.0);
        for (const auto& t : terms_) {
            double base = t.coeff;
            for (int j = 0; j < d_; ++j) {
                if (j == axis) continue;
                for (int k = 0; k < t.exp[j]; ++k) base *= x[j];
            }
            // (x_axis + t)^e expanded over t-powers.
            int e = t.exp[axis];
            double binom = 1.0;
            for (int k = 0; k <= e; ++k) {
                out[k] += base * binom * ipow(x[axis], e - k);
                binom = binom * (e - k) / (k + 1);
            }
        }
        return Poly(std::move(out));
    }

    Poly to_univariate() const {
        if (d_ != 1) throw std::logic_error("SparsePoly::to_univariate: arity != 1");
        return restrict_axis({0.0}, 0);
    }

    bool equals_variable(int axis) const {
        if (terms_.size() != 1) return false;
        const Term& t = terms_[0];
        if (t.coeff != 1.0) return false;
        for (int j = 0; j < d_; ++j)
            if (t.exp[j] != (j == axis ? 1 : 0)) return false;
        return true;
    }

  private:
    void prune() {
        terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                    [](const Term& t) { return t.coeff == 0.0; }),
                     terms_.end());
    }
    int d_;
    std::vector<Term> terms_;
};

// Grid-estimated derivative bounds with a multiplicative safety factor.
struct DerivBounds {
    double L1 = 0.0;  // sup of order-2 partials
    double L2 = 0.0;  // sup of first-order gradient sup-norms
    double safety = 1.0;
};

enum class MapKind { veronese, polynomial };

// Polynomial map f : U in R^d -> R^n with exact derivatives.
class ManifoldMap {
  public:
    static ManifoldMap veronese(int n) {
        if (n < 1) throw std::invalid_argument("veronese: n >= 1 required");
        std::vector<SparsePoly> coords;
        coords.reserve(n);
        for (int k = 1; k <= n; ++k) coords.push_back(SparsePoly::monomial(1, {k}));
        ManifoldMap m(1, n, MapKind::veronese, std::move(coords));
        m.id_ = "veronese:" + std::to_string(n);
        return m;
    }

    // Per-coordinate dense coefficient rows, ascending degree (d = 1).
    static ManifoldMap polynomial_1d(const std::vector<std::vector<double>>& coeffs) {
        if (coeffs.empty()) throw std::invalid_argument("polynomial_1d: no coordinates");
        std::vector<SparsePoly> coords;
        for (const auto& row : coeffs) coords.push_back(SparsePoly::from_dense_1d(row));
        ManifoldMap m(1, static_cast<int>(coeffs.size()), MapKind::polynomial, std::move(coords));
        m.id_ = "poly:d1:n" + std::to_string(m.n_);
        return m;
    }

    static ManifoldMap polynomial(int d, std::vector<SparsePoly> coords) {
        if (coords.empty()) throw std::invalid_argument("polynomial: no coordinates");
        const int n = static_cast<int>(coords.size());
        ManifoldMap m(d, n, MapKind::polynomial, std::move(coords));
        m.id_ = "poly:d" + std::to_string(d) + ":n" + std::to_string(m.n_);
        return m;
    }

    int domain_dim() const { return d_; }
    int ambient_dim() const { return n_; }
    MapKind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    const SparsePoly& coord(int i) const { return coords_.at(i); }
    // f1(x) = x1 holds identically (checked on the coefficient table).
    bool first_coordinate_chart() const { return first_chart_; }

    Vec eval(const Vec& x) const {
        check_point(x);
        Vec y(n_);
        for (int i = 0; i < n_; ++i) y[i] = coords_[i].eval(x);
        return y;
    }

    Vec partial(const Vec& x, const MultiIndex& beta) const {
        check_point(x);
        if (static_cast<int>(beta.size()) != d_)
            throw std::invalid_argument("partial: multiindex arity mismatch");
        Vec y(n_);
        for (int i = 0; i < n_; ++i) y[i] = coords_[i].partial(beta).eval(x);
        return y;
    }

    // Rows: gradient of f_j (j = 1..n), so the matrix is n x d.
    std::vector<Vec> jacobian(const Vec& x) const {
        check_point(x);
        std::vector<Vec> rows(n_, Vec(d_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < d_; ++j) rows[i][j] = coords_[i].derivative(j).eval(x);
        return rows;
    }

    // Smallest l <= l_max with {d_beta f(x) : 1 <= |beta|_1 <= l} spanning R^n.
    // Singular values below rank_tol * sigma_max count as zero.
    std::optional<int> nondeg_order(const Vec& x, int l_max, double rank_tol = 1e-9) const {
        check_point(x);
        if (l_max < 1) throw std::invalid_argument("nondeg_order: l_max >= 1 required");
        std::vector<Vec> cols;
        for (int l = 1; l <= l_max; ++l) {
            for (const auto& beta : multiindices_of_order(d_, l)) cols.push_back(partial(x, beta));
            Eigen::MatrixXd M(n_, static_cast<int>(cols.size()));
            for (size_t c = 0; c < cols.size(); ++c)
                for (int r = 0; r < n_; ++r) M(r, static_cast<int>(c)) = cols[c][r];
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
            const auto& sv = svd.singularValues();
            if (sv.size() == 0) continue;
            double smax = sv(0);
            int rank = 0;
            for (int i = 0; i < sv.size(); ++i)
                if (sv(i) > rank_tol * smax) ++rank;
            if (rank == n_) return l;
        }
        return std::nullopt;
    }

    // Grid suprema of the derivative bounds. L2 is taken over `region`;
    // L1 over `region.scaled(l1_region_scale)`.
    DerivBounds derivative_bounds(const Ball& region, int grid_per_axis = 33, double safety = 1.1,
                                  double l1_region_scale = 1.0) const {
        if (grid_per_axis < 2) throw std::invalid_argument("derivative_bounds: grid_per_axis >= 2");
        if (!(region.radius > 0.0)) throw std::invalid_argument("derivative_bounds: degenerate region");
        DerivBounds b;
        b.safety = safety;
        Ball l1_region = region.scaled(l1_region_scale);
        for (const auto& beta : multiindices_of_order(d_, 2)) {
            for_grid(l1_region, grid_per_axis, [&](const Vec& x) {
                b.L1 = std::max(b.L1, linf_norm(partial(x, beta)));
            });
        }
        for_grid(region, grid_per_axis, [&](const Vec& x) {
            auto J = jacobian(x);
            for (const auto& row : J) b.L2 = std::max(b.L2, linf_norm(row));
        });
        b.L1 *= safety;
        b.L2 *= safety;
        return b;
    }

    static std::vector<MultiIndex> multiindices_of_order(int d, int order) {
        std::vector<MultiIndex> out;
        MultiIndex cur(d, 0);
        enumerate_rec(out, cur, 0, order);
        return out;
    }

  private:
    ManifoldMap(int d, int n, MapKind kind, std::vector<SparsePoly> coords)
        : d_(d), n_(n), kind_(kind), coords_(std::move(coords)) {
        if (d_ < 1 || n_ < 1) throw std::invalid_argument("ManifoldMap: d, n >= 1 required");
        for (const auto& c : coords_)
            if (c.arity() != d_) throw std::invalid_argument("ManifoldMap: arity mismatch");
        first_chart_ = coords_[0].equals_variable(0);
    }

    void check_point(const Vec& x) const {
        if (static_cast<int>(x.size()) != d_)
            throw std::invalid_argument("ManifoldMap: point dimension mismatch");
    }

    static void enumerate_rec(std::vector<MultiIndex>& out, MultiIndex& cur, int pos, int remaining) {
        if (pos == static_cast<int>(cur.size()) - 1) {
            cur[pos] = remaining;
            out.push_back(cur);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            cur[pos] = k;
            enumerate_rec(out, cur, pos + 1, remaining - k);
        }
    }

    template <class F>
    void for_grid(const Ball& region, int per_axis, F&& fn) const {
        // Grid over the bounding cube (superset of the ball): valid for sup
        // estimates of polynomials, endpoints included.
        Vec x(d_);
        std::vector<int> idx(d_, 0);
        for (;;) {
            for (int j = 0; j < d_; ++j) {
                double lo = region.center[j] - region.radius;
                double hi = region.center[j] + region.radius;
                x[j] = lo + (hi - lo) * idx[j] / (per_axis - 1);
            }
            fn(x);
            int j = 0;
            while (j < d_ && ++idx[j] == per_axis) idx[j++] = 0;
            if (j == d_) break;
        }
    }

    int d_, n_;
    MapKind kind_;
    std::vector<SparsePoly> coords_;
    bool first_chart_ = false;
    std::string id_;
};

}  // namespace dioph
