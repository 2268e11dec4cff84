#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dq::phasegrid {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Grid2D
// ---------------------------------------------------------------------------

/// Uniform complex sampling of phase space on [-L, L)^2 in (p, q) with grid
/// step 2L/N; row index is the p sample, column index the q sample.
class Grid2D {
  public:
    Grid2D(int n, double half_extent, double hbar)
        : n_(n), l_(half_extent), hbar_(hbar), v_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        if (n < 16 || (n & (n - 1)) != 0) throw std::invalid_argument("Grid2D: N must be a power of two >= 16");
        if (half_extent <= 0 || hbar <= 0) throw std::invalid_argument("Grid2D: L and hbar must be positive");
    }

    int n() const { return n_; }
    double half_extent() const { return l_; }
    double hbar() const { return hbar_; }
    double step() const { return 2.0 * l_ / n_; }
    double coord(int i) const { return -l_ + step() * i; }  // same lattice on both axes

    cplx& at(int ip, int iq) { return v_[static_cast<std::size_t>(ip) * n_ + iq]; }
    const cplx& at(int ip, int iq) const { return v_[static_cast<std::size_t>(ip) * n_ + iq]; }
    const std::vector<cplx>& values() const { return v_; }
    std::vector<cplx>& values() { return v_; }

    bool boundary_warning() const { return boundary_warning_; }
    void set_boundary_warning(bool w) { boundary_warning_ = w; }

    bool same_geometry(const Grid2D& o) const { return n_ == o.n_ && l_ == o.l_ && hbar_ == o.hbar_; }

    /// Sample f(p, q) on the grid.
    template <typename F>
    static Grid2D sample(int n, double l, double hbar, F&& f) {
        Grid2D g(n, l, hbar);
        for (int ip = 0; ip < n; ++ip)
            for (int iq = 0; iq < n; ++iq) g.at(ip, iq) = f(g.coord(ip), g.coord(iq));
        return g;
    }

    double l2_norm() const {
        double s = 0;
        for (const cplx& z : v_) s += std::norm(z);
        return std::sqrt(s * step() * step());
    }

    /// L2 mass fraction in the outer band |p| >= 0.9 L or |q| >= 0.9 L.
    double boundary_mass_fraction() const {
        double total = 0, band = 0;
        for (int ip = 0; ip < n_; ++ip)
            for (int iq = 0; iq < n_; ++iq) {
                double m = std::norm(at(ip, iq));
                total += m;
                if (std::abs(coord(ip)) >= 0.9 * l_ || std::abs(coord(iq)) >= 0.9 * l_) band += m;
            }
        return total == 0 ? 0.0 : band / total;
    }

    friend Grid2D operator-(const Grid2D& a, const Grid2D& b) {
        if (!a.same_geometry(b)) throw std::invalid_argument("Grid2D: geometry mismatch");
        Grid2D r = a;
        for (std::size_t i = 0; i < r.v_.size(); ++i) r.v_[i] -= b.v_[i];
        return r;
    }
    friend Grid2D operator*(double s, const Grid2D& a) {
        Grid2D r = a;
        for (auto& z : r.v_) z *= s;
        return r;
    }

    /// Relative L2 distance ||a - b|| / ||b||.
    static double rel_l2_error(const Grid2D& a, const Grid2D& b) {
        double num = 0, den = 0;
        for (std::size_t i = 0; i < a.v_.size(); ++i) {
            num += std::norm(a.v_[i] - b.v_[i]);
            den += std::norm(b.v_[i]);
        }
        return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
    }

    /// Binary dump: header (N, L, hbar) then row-major complex pairs,
    /// little-endian 64-bit floats.
    void dump(std::ostream& os) const {
        std::uint64_t n64 = static_cast<std::uint64_t>(n_);
        os.write(reinterpret_cast<const char*>(&n64), 8);
        os.write(reinterpret_cast<const char*>(&l_), 8);
        os.write(reinterpret_cast<const char*>(&hbar_), 8);
        for (const cplx& z : v_) {
            double re = z.real(), im = z.imag();
            os.write(reinterpret_cast<const char*>(&re), 8);
            os.write(reinterpret_cast<const char*>(&im), 8);
        }
    }

    static Grid2D load(std::istream& is) {
        std::uint64_t n64 = 0;
        double l = 0, hbar = 0;
        is.read(reinterpret_cast<char*>(&n64), 8);
        is.read(reinterpret_cast<char*>(&l), 8);
        is.read(reinterpret_cast<char*>(&hbar), 8);
        if (!is) throw std::runtime_error("Grid2D: truncated dump header");
        Grid2D g(static_cast<int>(n64), l, hbar);
        for (auto& z : g.v_) {
            double re = 0, im = 0;
            is.read(reinterpret_cast<char*>(&re), 8);
            is.read(reinterpret_cast<char*>(&im), 8);
            z = {re, im};
        }
        if (!is) throw std::runtime_error("Grid2D: truncated dump payload");
        return g;
    }

  private:
    int n_;
    double l_, hbar_;
    std::vector<cplx> v_;
    bool boundary_warning_ = false;
};

/// Radial erfc window: ~1 inside r0, decays over width w. Used to sample
/// polynomial observables so the periodized FFT sees decaying data.
inline double radial_window(double p, double q, double r0, double w) {
    double r = std::sqrt(p * p + q * q);
    return 0.5 * std::erfc((r - r0) / w);
}

// ---------------------------------------------------------------------------
// FFT plumbing (FFTW, deterministic ESTIMATE plans, plan cache)
// ---------------------------------------------------------------------------

namespace detail {

class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    /// Batched 1D transform of `howmany` contiguous rows of length n
    /// (in-place, stride 1, dist n). sign: FFTW_FORWARD or FFTW_BACKWARD.
    void rows(cplx* data, int n, int howmany, int sign) {
        fftw_plan plan = get(n, howmany, sign);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
    }

  private:
    fftw_plan get(int n, int howmany, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(n, howmany, sign);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        std::vector<cplx> scratch(static_cast<std::size_t>(n) * static_cast<std::size_t>(howmany));
        fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, reinterpret_cast<fftw_complex*>(scratch.data()), nullptr,
                                            1, n, reinterpret_cast<fftw_complex*>(scratch.data()), nullptr, 1, n, sign,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache_.emplace(key, plan);
        return plan;
    }

    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> cache_;
};

/// Signed frequency index for bin k of an N-point DFT.
inline int signed_freq(int k, int n) { return k < n / 2 ? k : k - n; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Numeric Moyal product (twisted-product formula via batched spectral shifts)
// ---------------------------------------------------------------------------

struct NumericMoyalOptions {
    double boundary_threshold = 1e-8;  // gate on the outer-band L2 mass fraction
};

/// Discrete realization of
///   (f * g)(q,p) = (2 pi)^{-2} int db dd e^{i(b+d)p}
///                  fhat(q - hbar d/2, b) ghat(q + hbar b/2, d)
/// where fhat/ghat are partial Fourier transforms in p. Shifts in q are
/// applied spectrally, so the scheme is exact on band-limited data and
/// spectrally accurate for Gaussian-decaying inputs. Linear in each argument.
inline Grid2D numeric_moyal(const Grid2D& f, const Grid2D& g, const NumericMoyalOptions& opts = {}) {
    if (!f.same_geometry(g)) throw std::invalid_argument("numeric_moyal: grid mismatch");
    const int n = f.n();
    const double l = f.half_extent();
    const double hbar = f.hbar();
    auto& fft = detail::FftPlans::instance();

    bool warn = f.boundary_mass_fraction() > opts.boundary_threshold ||
                g.boundary_mass_fraction() > opts.boundary_threshold;

    const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    // Step 1: partial FT over p (columns) -> fhat[m][iq]; done by transposing
    // into row-major frequency layout first: copy columns to rows.
    std::vector<cplx> fhat(nn), ghat(nn);
    for (int ip = 0; ip < n; ++ip)
        for (int iq = 0; iq < n; ++iq) {
            fhat[static_cast<std::size_t>(iq) * n + ip] = f.at(ip, iq);
            ghat[static_cast<std::size_t>(iq) * n + ip] = g.at(ip, iq);
        }
    // rows are now fixed-q slices over p; forward FFT per row gives b-modes
    fft.rows(fhat.data(), n, n, FFTW_FORWARD);
    fft.rows(ghat.data(), n, n, FFTW_FORWARD);
    // transpose to frequency-major [m][iq]
    std::vector<cplx> fmq(nn), gmq(nn);
    for (int iq = 0; iq < n; ++iq)
        for (int m = 0; m < n; ++m) {
            fmq[static_cast<std::size_t>(m) * n + iq] = fhat[static_cast<std::size_t>(iq) * n + m];
            gmq[static_cast<std::size_t>(m) * n + iq] = ghat[static_cast<std::size_t>(iq) * n + m];
        }
    // Step 2: FT over q per frequency row -> F2[m][u], G2[m][u]
    fft.rows(fmq.data(), n, n, FFTW_FORWARD);
    fft.rows(gmq.data(), n, n, FFTW_FORWARD);

    // Phase table W[u][k] = exp(-i theta sigma(u) sigma(k)), theta = hbar pi^2 / (2 L^2).
    const double theta = hbar * M_PI * M_PI / (2.0 * l * l);
    std::vector<cplx> phase(nn);
    for (int u = 0; u < n; ++u) {
        double su = detail::signed_freq(u, n);
        for (int k = 0; k < n; ++k) {
            double sk = detail::signed_freq(k, n);
            double a = -theta * su * sk;
            phase[static_cast<std::size_t>(u) * n + k] = {std::cos(a), std::sin(a)};
        }
    }

    std::vector<cplx> abuf(nn), bbuf(nn), acc(nn, cplx{0.0, 0.0});
    for (int m = 0; m < n; ++m) {
        // A[m'][j] = f^(q_j - hbar d_{m'}/2, b_m): modulate F2[m][u] by W[u][m']
        const cplx* f2row = &fmq[static_cast<std::size_t>(m) * n];
        for (int mp = 0; mp < n; ++mp) {
            cplx* dst = &abuf[static_cast<std::size_t>(mp) * n];
            for (int u = 0; u < n; ++u) dst[u] = f2row[u] * phase[static_cast<std::size_t>(u) * n + mp];
        }
        fft.rows(abuf.data(), n, n, FFTW_BACKWARD);
        // B[m'][j] = g^(q_j + hbar b_m/2, d_{m'}): modulate G2[m'][u] by conj(W[u][m])
        for (int mp = 0; mp < n; ++mp) {
            const cplx* src = &gmq[static_cast<std::size_t>(mp) * n];
            cplx* dst = &bbuf[static_cast<std::size_t>(mp) * n];
            for (int u = 0; u < n; ++u) dst[u] = src[u] * std::conj(phase[static_cast<std::size_t>(u) * n + m]);
        }
        fft.rows(bbuf.data(), n, n, FFTW_BACKWARD);
        // accumulate T[j][(m+m') % n] += A B
        for (int mp = 0; mp < n; ++mp) {
            int kappa = (m + mp) & (n - 1);
            const cplx* arow = &abuf[static_cast<std::size_t>(mp) * n];
            const cplx* brow = &bbuf[static_cast<std::size_t>(mp) * n];
            for (int j = 0; j < n; ++j) acc[static_cast<std::size_t>(j) * n + kappa] += arow[j] * brow[j];
        }
    }
    // Step 3: synthesize over kappa -> p per q row, scale by
    // (quadrature 1/N^2) * (two spectral-shift IFFT normalizations 1/N^2).
    fft.rows(acc.data(), n, n, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(n) * n * n * n);
    Grid2D out(n, l, hbar);
    for (int j = 0; j < n; ++j)
        for (int ip = 0; ip < n; ++ip) out.at(ip, j) = acc[static_cast<std::size_t>(j) * n + ip] * scale;
    out.set_boundary_warning(warn);
    return out;
}

// ---------------------------------------------------------------------------
// Hermite-basis Wigner symbols (the independent oracle) and projectors
// ---------------------------------------------------------------------------

/// Normalized Hermite-function values psi_0..psi_{kmax}(x).
inline std::vector<double> hermite_functions(int kmax, double x, double hbar) {
    std::vector<double> psi(static_cast<std::size_t>(kmax) + 1);
    double xi = x / std::sqrt(hbar);
    double norm = std::pow(M_PI * hbar, -0.25);
    psi[0] = norm * std::exp(-0.5 * xi * xi);
    if (kmax >= 1) psi[1] = std::sqrt(2.0) * xi * psi[0];
    for (int k = 1; k < kmax; ++k)
        psi[static_cast<std::size_t>(k) + 1] =
            std::sqrt(2.0 / (k + 1)) * xi * psi[static_cast<std::size_t>(k)] -
            std::sqrt(static_cast<double>(k) / (k + 1)) * psi[static_cast<std::size_t>(k) - 1];
    return psi;
}

/// Resolution gate: the grid must contain the classical radius of the state
/// with margin in both position and momentum.
inline void check_resolution(int n, double l, double hbar, int kmax) {
    double need = std::sqrt((2.0 * kmax + 1.0) * hbar) + 4.0 * std::sqrt(hbar);
    if (l < need) throw std::invalid_argument("hermite_wigner: half-extent too small for the requested state");
    double nyquist = M_PI * hbar / (2.0 * l / n);
    if (nyquist < need) throw std::invalid_argument("hermite_wigner: grid too coarse for the requested state");
}

/// Wigner symbol of the rank-one operator |n><m| by direct quadrature of
///   W(q,p) = int dy e^{-i p y / hbar} psi_n(q + y/2) psi_m(q - y/2),
/// evaluated with a DFT-aligned y lattice (M = 2N points, dy = 2 pi hbar/(M dx)).
inline Grid2D hermite_wigner(int n_level, int m_level, int n, double l, double hbar) {
    if (n_level < 0 || m_level < 0) throw std::invalid_argument("hermite_wigner: negative level");
    check_resolution(n, l, hbar, std::max(n_level, m_level));
    auto& fft = detail::FftPlans::instance();
    const int m = 2 * n;
    const double dx = 2.0 * l / n;
    const double dy = 2.0 * M_PI * hbar / (m * dx);
    const double yspan = m * dy / 2.0;
    const int kmax = std::max(n_level, m_level);

    Grid2D g(n, l, hbar);
    std::vector<cplx> row(static_cast<std::size_t>(m));
    for (int jq = 0; jq < n; ++jq) {
        double q = g.coord(jq);
        for (int ly = 0; ly < m; ++ly) {
            double y = (ly - m / 2) * dy;
            double a = hermite_functions(kmax, q + 0.5 * y, hbar)[static_cast<std::size_t>(n_level)];
            double b = hermite_functions(kmax, q - 0.5 * y, hbar)[static_cast<std::size_t>(m_level)];
            row[static_cast<std::size_t>(ly)] = a * b;
        }
        fft.rows(row.data(), m, 1, FFTW_FORWARD);
        for (int kp = 0; kp < n; ++kp) {
            double p = g.coord(kp);
            int bin = ((kp - n / 2) % m + m) % m;
            double ph = p * yspan / hbar;
            g.at(kp, jq) = dy * cplx{std::cos(ph), std::sin(ph)} * row[static_cast<std::size_t>(bin)];
        }
    }
    return g;
}

/// Closed-form oscillator eigenprojector symbol
///   pi_n(q,p) = 2 (-1)^n e^{-2H/hbar} L_n(4H/hbar),   H = (p^2 + q^2)/2.
inline Grid2D oscillator_projector(int level, int n, double l, double hbar) {
    if (level < 0) throw std::invalid_argument("oscillator_projector: negative level");
    return Grid2D::sample(n, l, hbar, [&](double p, double q) {
        double h = 0.5 * (p * p + q * q);
        double x = 4.0 * h / hbar;
        double lk = 1.0, lkm1 = 0.0;  // L_0, L_{-1}
        for (int k = 0; k < level; ++k) {
            double next = ((2.0 * k + 1.0 - x) * lk - k * lkm1) / (k + 1);
            lkm1 = lk;
            lk = next;
        }
        double sign = (level % 2 == 0) ? 1.0 : -1.0;
        return cplx{2.0 * sign * std::exp(-2.0 * h / hbar) * lk, 0.0};
    });
}

// ---------------------------------------------------------------------------
// Numeric spectral extraction from the star exponential
// ---------------------------------------------------------------------------

struct SpectralFourierOptions {
    double conv_tol = 1e-2;       // flag when |I(eps/2) - I(eps)| exceeds this
    int max_period_multiple = 64; // search bound for joint periodicity
};

struct SpectralFourierResult {
    cplx value;          // Richardson-extrapolated coefficient
    bool converged;      // eps-halving agreement within tolerance
    double disagreement; // |I(eps/2) - I(eps)|
};

/// Fourier coefficient of the oscillator star exponential at frequency omega:
///   (1/P) int_0^P E(H, t - i eps) e^{+i omega t} dt,
/// with E(H,z) = sec(z/2) exp(-2 i H tan(z/2) / hbar) (the d > 0 closed form,
/// ell = 1) and P the smallest joint period 4 pi m. Richardson-extrapolated
/// over eps and eps/2; converges to pi_n(point) for omega = n + 1/2.
inline std::vector<SpectralFourierResult> spectral_fourier(double omega, double eps,
                                                           const std::vector<std::pair<double, double>>& points,
                                                           double hbar, const SpectralFourierOptions& opts = {}) {
    if (eps <= 0 || eps > 1e-2) throw std::invalid_argument("spectral_fourier: eps must lie in (0, 1e-2]");
    // joint period: 2 m omega integral
    int mult = 0;
    for (int m = 1; m <= opts.max_period_multiple; ++m) {
        double v = 2.0 * m * omega;
        if (std::abs(v - std::round(v)) < 1e-9) {
            mult = m;
            break;
        }
    }
    if (mult == 0) throw std::invalid_argument("spectral_fourier: no joint period for this frequency");
    const double period = 4.0 * M_PI * mult;

    auto integral = [&](double h_value, double e) {
        // resolve the Lorentzian widths ~ e: dt <= e/8, power-of-two count
        double want = 8.0 * period / e;
        int mq = 1 << 14;
        while (mq < want && mq < (1 << 21)) mq <<= 1;
        cplx acc{0.0, 0.0};
        double dt = period / mq;
        for (int k = 0; k < mq; ++k) {
            double t = (k + 0.5) * dt;  // midpoint rule avoids the t=0 cusp alignment
            cplx z{0.5 * t, -0.5 * e};
            cplx c = std::cos(z);
            cplx s = std::sin(z);
            cplx e_val = (1.0 / c) * std::exp(cplx{0.0, -2.0 * h_value / hbar} * (s / c));
            acc += e_val * std::exp(cplx{0.0, omega * t});
        }
        return acc * (dt / period);
    };

    std::vector<SpectralFourierResult> out;
    out.reserve(points.size());
    for (const auto& [p, q] : points) {
        double h = 0.5 * (p * p + q * q);
        cplx i1 = integral(h, eps);
        cplx i2 = integral(h, eps / 2);
        cplx rich = 2.0 * i2 - i1;
        double dis = std::abs(i2 - i1);
        out.push_back({rich, dis <= opts.conv_tol, dis});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hermite-basis operators (matrix side of the Wigner correspondence)
// ---------------------------------------------------------------------------

/// Operator on the span of the first M Hermite functions.
struct HermiteMatrix {
    int dim;
    std::vector<cplx> a;  // row-major dim x dim; a[n*dim + m] = <n|A|m>

    explicit HermiteMatrix(int d) : dim(d), a(static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
        if (d < 1) throw std::invalid_argument("HermiteMatrix: dimension must be >= 1");
    }

    static HermiteMatrix projector(int level, int d) {
        HermiteMatrix m(d);
        if (level < 0 || level >= d) throw std::invalid_argument("HermiteMatrix: level outside basis");
        m.at(level, level) = 1.0;
        return m;
    }

    cplx& at(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
    const cplx& at(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }

    friend HermiteMatrix operator*(const HermiteMatrix& x, const HermiteMatrix& y) {
        if (x.dim != y.dim) throw std::invalid_argument("HermiteMatrix: dimension mismatch");
        HermiteMatrix r(x.dim);
        for (int i = 0; i < x.dim; ++i)
            for (int k = 0; k < x.dim; ++k) {
                cplx v = x.at(i, k);
                if (v == cplx{0.0, 0.0}) continue;
                for (int j = 0; j < x.dim; ++j) r.at(i, j) += v * y.at(k, j);
            }
        return r;
    }

    /// Wigner symbol sum_{n,m} A_{nm} W_{nm} on the grid.
    Grid2D wigner_symbol(int n, double l, double hbar) const {
        Grid2D g(n, l, hbar);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) {
                cplx v = at(r, c);
                if (v == cplx{0.0, 0.0}) continue;
                Grid2D w = hermite_wigner(r, c, n, l, hbar);
                for (std::size_t i = 0; i < g.values().size(); ++i) g.values()[i] += v * w.values()[i];
            }
        return g;
    }
};

/// Phase-space trace: (1/2 pi hbar) int F dp dq by the grid quadrature.
inline cplx phase_space_trace(const Grid2D& g) {
    cplx acc{0.0, 0.0};
    for (const cplx& z : g.values()) acc += z;
    return acc * (g.step() * g.step() / (2.0 * M_PI * g.hbar()));
}

}  // namespace dq::phasegrid
