#include <cmath>
#include <vector>

#include "burstwatch/features.hpp"

namespace burstwatch::features {

namespace {

/// Least squares via Householder QR. a is row-major n x p with n >= p and
/// full column rank (Vandermonde over distinct abscissae here).
std::vector<double> qr_solve(std::vector<double> a, std::vector<double> y,
                             std::size_t n, std::size_t p) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a[i * p + k] * a[i * p + k];
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = a[k * p + k] > 0.0 ? -norm : norm;
        double vnorm_sq = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = a[i * p + k];
            if (i == k) v[i] -= alpha;
            vnorm_sq += v[i] * v[i];
        }
        if (vnorm_sq == 0.0) continue;
        for (std::size_t j = k; j < p; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * a[i * p + j];
            const double f = 2.0 * dot / vnorm_sq;
            for (std::size_t i = k; i < n; ++i) a[i * p + j] -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += v[i] * y[i];
        const double f = 2.0 * dot / vnorm_sq;
        for (std::size_t i = k; i < n; ++i) y[i] -= f * v[i];
    }
    std::vector<double> x(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        double rhs = y[k];
        for (std::size_t j = k + 1; j < p; ++j) rhs -= a[k * p + j] * x[j];
        const double diag = a[k * p + k];
        x[k] = diag != 0.0 ? rhs / diag : 0.0;
    }
    return x;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

PolyFit polyfit(std::span<const int> slice) {
    if (slice.empty()) throw ContractViolation("polyfit needs >= 1 point");
    const std::size_t n = slice.size();
    PolyFit fit;
    fit.beta = static_cast<int>(std::min<std::size_t>(n - 1, 6));
    if (fit.beta == 0) {
        double sum = 0.0;
        for (int v : slice) sum += v;
        fit.coeffs[0] = sum / static_cast<double>(n);
        return fit;
    }

    // fit on u = (x - mid)/half in [-1,1] for conditioning, then expand the
    // coefficients back to monomials in x (minutes since the trigger)
    const std::size_t p = static_cast<std::size_t>(fit.beta) + 1;
    const double mid = static_cast<double>(n - 1) / 2.0;
    const double half = std::max(mid, 1.0);
    std::vector<double> a(n * p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) - mid) / half;
        double pw = 1.0;
        for (std::size_t k = 0; k < p; ++k) {
            a[i * p + k] = pw;
            pw *= u;
        }
        y[i] = slice[i];
    }
    const std::vector<double> scaled = qr_solve(std::move(a), std::move(y), n, p);

    for (std::size_t k = 0; k < p; ++k) {
        const double ak = scaled[k] / std::pow(half, static_cast<double>(k));
        double mpow = 1.0;  // (-mid)^(k-j), built from j=k downwards
        for (std::size_t j = k + 1; j-- > 0;) {
            fit.coeffs[j] += ak * binomial(static_cast<int>(k), static_cast<int>(j)) * mpow;
            mpow *= -mid;
        }
    }
    return fit;
}

double polyfit_eval(const PolyFit& fit, double x) {
    double acc = 0.0;
    for (int k = 6; k >= 0; --k) acc = acc * x + fit.coeffs[static_cast<std::size_t>(k)];
    return acc;
}

}  // namespace burstwatch::features
