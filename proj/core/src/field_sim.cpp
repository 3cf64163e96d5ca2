#include "ecfield/field_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "ecfield/errors.hpp"
#include "ecfield/parallel.hpp"
#include "ecfield/rng.hpp"

namespace ecfield {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kActiveRelTol = 1e-14;   // spectral mass below this of max carries no randomness
constexpr std::size_t kPrunedMax = 256;   // direct synthesis up to this many active modes
constexpr std::size_t kMaxPadDoublings = 3;

struct SpectrumCandidate {
    std::size_t size = 0;
    std::vector<double> eigenvalues;  // raw, may contain negatives
    double min_eig = 0.0;
    double max_eig = 0.0;
    double neg_mass_fraction = 0.0;
};

SpectrumCandidate diagonalize_circle(const CovarianceModel& model, double h, std::size_t ng) {
    SpectrumCandidate cand;
    cand.size = ng;
    std::vector<double> re(ng), im(ng, 0.0);
    for (std::size_t d = 0; d < ng; ++d) {
        const std::size_t dist = std::min(d, ng - d);
        re[d] = model.evaluate(h * static_cast<double>(dist));
    }
    Fft fft(ng);
    fft.forward(re.data(), im.data());
    cand.eigenvalues = std::move(re);
    double mn = cand.eigenvalues[0], mx = cand.eigenvalues[0];
    double neg = 0.0, abs_total = 0.0;
    for (double lam : cand.eigenvalues) {
        mn = std::min(mn, lam);
        mx = std::max(mx, lam);
        abs_total += std::fabs(lam);
        if (lam < 0.0) neg -= lam;
    }
    cand.min_eig = mn;
    cand.max_eig = mx;
    cand.neg_mass_fraction = abs_total > 0.0 ? neg / abs_total : 0.0;
    return cand;
}

// Smallest circle in (lo, hi] whose wrap kink |R'(h Ng / 2)| is minimal.
std::size_t kink_optimal_size(const CovarianceModel& model, double h, std::size_t lo,
                              std::size_t hi, double& kink_out) {
    std::size_t best = 0;
    double best_kink = 0.0;
    for (std::size_t ng = lo + 1; ng <= hi; ++ng) {
        const double kink = std::fabs(model.derivative(1, 0.5 * h * static_cast<double>(ng)));
        if (best == 0 || kink < best_kink) {
            best = ng;
            best_kink = kink;
        }
    }
    kink_out = best_kink;
    return best;
}

}  // namespace

unsigned default_thread_count() {
    if (const char* env = std::getenv("ECFIELD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

GridSampler1D::GridSampler1D(CovarianceModel model, double T, std::size_t n_grid,
                             std::size_t pad_factor)
    : model_(std::move(model)), T_(T), n_grid_(n_grid) {
    if (!Fft::is_power_of_two(n_grid) || n_grid < 1024) {
        throw std::invalid_argument("GridSampler1D: n_grid must be a power of two >= 1024");
    }
    if (pad_factor < 2) {
        throw std::invalid_argument("GridSampler1D: pad_factor must be at least 2");
    }
    if (!(T > 0.0)) throw std::invalid_argument("GridSampler1D: T must be positive");
    h_ = T / static_cast<double>(n_grid - 1);
    build_spectrum(pad_factor);
}

void GridSampler1D::build_spectrum(std::size_t pad_requested) {
    SpectrumCandidate accepted;
    SpectrumCandidate fallback;
    bool have_fallback = false;

    std::size_t pad = pad_requested;
    for (std::size_t attempt = 0; attempt <= kMaxPadDoublings && accepted.size == 0; ++attempt) {
        const std::size_t canonical = pad * n_grid_;
        SpectrumCandidate cand = diagonalize_circle(model_, h_, canonical);
        const double canonical_kink =
            std::fabs(model_.derivative(1, 0.5 * h_ * static_cast<double>(canonical)));
        if (cand.min_eig >= -kTolPsd * cand.max_eig) {
            accepted = std::move(cand);
        } else {
            if (!have_fallback || cand.neg_mass_fraction < fallback.neg_mass_fraction) {
                fallback = std::move(cand);
                have_fallback = true;
            }
            // A periodic covariance wraps smoothly only on a period multiple;
            // look for a circle in the same pad window with a far smaller
            // derivative kink at the antipode.
            double kink = 0.0;
            const std::size_t alt =
                kink_optimal_size(model_, h_, canonical, 2 * canonical, kink);
            if (alt != 0 && kink < 1e-3 * canonical_kink) {
                SpectrumCandidate alt_cand = diagonalize_circle(model_, h_, alt);
                if (alt_cand.min_eig >= -kTolPsd * alt_cand.max_eig) {
                    accepted = std::move(alt_cand);
                } else if (alt_cand.neg_mass_fraction < fallback.neg_mass_fraction) {
                    fallback = std::move(alt_cand);
                }
            }
        }
        pad *= 2;
    }

    SpectrumCandidate chosen = accepted.size != 0 ? std::move(accepted) : std::move(fallback);
    embedding_size_ = chosen.size;
    pad_used_ = (embedding_size_ + n_grid_ - 1) / n_grid_;

    // clamp negatives, prune spectral dust, and account for both
    double abs_total = 0.0, discarded = 0.0;
    for (double lam : chosen.eigenvalues) abs_total += std::fabs(lam);
    const double active_floor = kActiveRelTol * chosen.max_eig;
    spectrum_.assign(embedding_size_, 0.0);
    active_k_.clear();
    active_amp_.clear();
    for (std::size_t k = 0; k < embedding_size_; ++k) {
        const double lam = chosen.eigenvalues[k];
        if (lam > active_floor) {
            spectrum_[k] = lam;
            active_k_.push_back(k);
            active_amp_.push_back(std::sqrt(lam / static_cast<double>(embedding_size_)));
        } else {
            discarded += std::fabs(lam);
        }
    }
    clamped_mass_ = abs_total > 0.0 ? discarded / abs_total : 0.0;
    if (clamped_mass_ > kClampMassCap) {
        std::ostringstream msg;
        msg << "GridSampler1D: circulant embedding failed; discarded spectral mass "
            << clamped_mass_ << " exceeds " << kClampMassCap << " (circle size "
            << embedding_size_ << ", min/max eigenvalue " << chosen.min_eig << "/"
            << chosen.max_eig << "). Try a larger pad_factor or a finer grid.";
        throw SamplerError(msg.str());
    }

    // the sampler's exact covariance must reproduce R on the first lags
    const double inv_ng = 1.0 / static_cast<double>(embedding_size_);
    for (std::size_t d = 0; d < 16 && d < n_grid_; ++d) {
        double cov = 0.0;
        for (std::size_t idx = 0; idx < active_k_.size(); ++idx) {
            const std::size_t k = active_k_[idx];
            const double ang = kTwoPi * static_cast<double>(k) * static_cast<double>(d) * inv_ng;
            cov += spectrum_[k] * std::cos(ang);
        }
        cov *= inv_ng;
        const double target = model_.evaluate(h_ * static_cast<double>(d));
        if (std::fabs(cov - target) > kCovCheckTol) {
            std::ostringstream msg;
            msg << "GridSampler1D: embedded covariance deviates from the model at lag " << d
                << " by " << std::fabs(cov - target);
            throw SamplerError(msg.str());
        }
    }

    pruned_synthesis_ = active_k_.size() <= kPrunedMax;
    if (!pruned_synthesis_) {
        fft_ = std::make_shared<const Fft>(embedding_size_);
    }
}

void GridSampler1D::synthesize_pair(NormalSampler& rng, std::vector<double>& re,
                                    std::vector<double>& im) const {
    const std::size_t ng = embedding_size_;
    const std::size_t n = n_grid_;
    if (pruned_synthesis_) {
        std::fill(re.begin(), re.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
        std::fill(im.begin(), im.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
        for (std::size_t idx = 0; idx < active_k_.size(); ++idx) {
            const std::size_t k = active_k_[idx];
            double z0, z1;
            rng.pair(z0, z1);
            const double zr = active_amp_[idx] * z0;
            const double zi = active_amp_[idx] * z1;
            const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(ng);
            const double wr = std::cos(ang), wi = std::sin(ang);
            double pr = zr, pi = zi;
            std::size_t m = 0;  // (k * (j+1)) mod ng after each update
            for (std::size_t j = 0; j < n; ++j) {
                re[j] += pr;
                im[j] += pi;
                m += k;
                if (m >= ng) m -= ng;
                if ((j & 511u) == 511u) {
                    // periodic exact re-anchor against phasor drift
                    const double a = -kTwoPi * static_cast<double>(m) / static_cast<double>(ng);
                    const double cr = std::cos(a), ci = std::sin(a);
                    pr = zr * cr - zi * ci;
                    pi = zr * ci + zi * cr;
                } else {
                    const double nr = pr * wr - pi * wi;
                    pi = pr * wi + pi * wr;
                    pr = nr;
                }
            }
        }
        return;
    }
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (std::size_t idx = 0; idx < active_k_.size(); ++idx) {
        const std::size_t k = active_k_[idx];
        double z0, z1;
        rng.pair(z0, z1);
        re[k] = active_amp_[idx] * z0;
        im[k] = active_amp_[idx] * z1;
    }
    fft_->forward(re.data(), im.data());
}

void GridSampler1D::sample_chunk(std::uint64_t master_seed, std::uint64_t chunk_index,
                                 std::size_t n_paths_total, const PathVisitor& visit) const {
    const std::size_t begin = static_cast<std::size_t>(chunk_index) * kChunkSize1D;
    if (begin >= n_paths_total) return;
    const std::size_t count = std::min(kChunkSize1D, n_paths_total - begin);

    NormalSampler rng(chunk_seed(master_seed, chunk_index));
    const std::size_t buf_size = pruned_synthesis_ ? n_grid_ : embedding_size_;
    std::vector<double> re(buf_size), im(buf_size);

    for (std::size_t p = 0; p < count; p += 2) {
        synthesize_pair(rng, re, im);
        SeedLineage lin{master_seed, chunk_index, static_cast<std::uint32_t>(p)};
        visit(std::span<const double>(re.data(), n_grid_), lin);
        if (p + 1 < count) {
            lin.index_in_chunk = static_cast<std::uint32_t>(p + 1);
            visit(std::span<const double>(im.data(), n_grid_), lin);
        }
    }
}

void GridSampler1D::sample(std::size_t n_paths, std::uint64_t master_seed,
                           const PathVisitor& visit) const {
    const std::size_t chunks = chunk_count(n_paths);
    for (std::size_t c = 0; c < chunks; ++c) {
        sample_chunk(master_seed, c, n_paths, visit);
    }
}

GridSampler2D::GridSampler2D(IsotropicModel model, double a, double b, std::size_t n_x,
                             std::size_t n_y, std::size_t pad_factor)
    : model_(std::move(model)), a_(a), b_(b), nx_(n_x), ny_(n_y) {
    if (model_.dimension() != 2) {
        throw std::invalid_argument("GridSampler2D: model dimension must be 2");
    }
    if (model_.radial().family() != CovFamily::SquaredExponential) {
        throw SamplerError(
            "GridSampler2D: 2D spectral synthesis supports the squared-exponential radial "
            "family (the only family with a closed-form planar spectral density here)");
    }
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("GridSampler2D: box sides must be positive");
    if (n_x < 2 || n_y < 2) throw std::invalid_argument("GridSampler2D: grid must be at least 2x2");
    if (pad_factor < 4) throw std::invalid_argument("GridSampler2D: pad_factor must be at least 4");

    hx_ = a / static_cast<double>(n_x - 1);
    hy_ = b / static_cast<double>(n_y - 1);
    torus_nx_ = pad_factor * n_x;
    torus_ny_ = pad_factor * n_y;
    const double Lx = static_cast<double>(torus_nx_) * hx_;
    const double Ly = static_cast<double>(torus_ny_) * hy_;

    // radial R(t) = exp(-(alpha t)^2 / 2); planar density S(w) =
    // (2 pi / alpha^2) exp(-w^2 / (2 alpha^2))
    const double alpha = model_.radial().time_scale() / model_.radial().params()[0];
    const double cutoff = 13.3 * alpha;  // density below 1e-38 of its peak
    kx_max_ = std::min<std::size_t>(torus_nx_ / 2,
                                    static_cast<std::size_t>(std::ceil(Lx * cutoff / kTwoPi)));
    ky_max_ = std::min<std::size_t>(torus_ny_ / 2,
                                    static_cast<std::size_t>(std::ceil(Ly * cutoff / kTwoPi)));

    const std::size_t mx = 2 * kx_max_ + 1;
    const std::size_t my = 2 * ky_max_ + 1;
    amp_.assign(mx * my, 0.0);
    double total = 0.0;
    for (std::size_t iy = 0; iy < my; ++iy) {
        const double ky = static_cast<double>(iy) - static_cast<double>(ky_max_);
        const double wy = kTwoPi * ky / Ly;
        for (std::size_t ix = 0; ix < mx; ++ix) {
            const double kx = static_cast<double>(ix) - static_cast<double>(kx_max_);
            const double wx = kTwoPi * kx / Lx;
            const double w2 = wx * wx + wy * wy;
            const double s = (kTwoPi / (alpha * alpha)) * std::exp(-0.5 * w2 / (alpha * alpha));
            const double weight = s / (Lx * Ly);
            amp_[iy * mx + ix] = std::sqrt(weight);
            total += weight;
        }
    }
    variance_bias_ = total - 1.0;
    if (std::fabs(variance_bias_) > 0.01) {
        std::ostringstream msg;
        msg << "GridSampler2D: realized marginal variance " << total
            << " deviates from 1 by more than 1%";
        throw SamplerError(msg.str());
    }

    // phase tables e^{-2 pi i k j / N}, angles reduced exactly in integers
    auto build_phase = [](std::size_t npts, std::size_t kmax, std::size_t torus_n,
                          std::vector<double>& pre, std::vector<double>& pim) {
        const std::size_t m = 2 * kmax + 1;
        pre.assign(npts * m, 0.0);
        pim.assign(npts * m, 0.0);
        for (std::size_t j = 0; j < npts; ++j) {
            for (std::size_t ik = 0; ik < m; ++ik) {
                const long long k = static_cast<long long>(ik) - static_cast<long long>(kmax);
                long long km = k % static_cast<long long>(torus_n);
                if (km < 0) km += static_cast<long long>(torus_n);
                const std::size_t mm =
                    (static_cast<std::size_t>(km) * j) % torus_n;
                const double ang = -kTwoPi * static_cast<double>(mm) / static_cast<double>(torus_n);
                pre[j * m + ik] = std::cos(ang);
                pim[j * m + ik] = std::sin(ang);
            }
        }
    };
    build_phase(nx_, kx_max_, torus_nx_, ex_re_, ex_im_);
    build_phase(ny_, ky_max_, torus_ny_, ey_re_, ey_im_);

    // spot-check the synthesized covariance along the x axis
    for (std::size_t lag = 0; lag < 8 && lag < nx_; ++lag) {
        double cov = 0.0;
        const double x = static_cast<double>(lag) * hx_;
        for (std::size_t iy = 0; iy < my; ++iy) {
            for (std::size_t ix = 0; ix < mx; ++ix) {
                const double kx = static_cast<double>(ix) - static_cast<double>(kx_max_);
                const double wx = kTwoPi * kx / Lx;
                const double wgt = amp_[iy * mx + ix];
                cov += wgt * wgt * std::cos(wx * x);
            }
        }
        const double target = model_.radial().evaluate(x);
        if (std::fabs(cov - target) > 1e-6) {
            std::ostringstream msg;
            msg << "GridSampler2D: synthesized covariance deviates from the model at lag "
                << lag << " by " << std::fabs(cov - target);
            throw SamplerError(msg.str());
        }
    }
}

void GridSampler2D::sample_chunk(std::uint64_t master_seed, std::uint64_t chunk_index,
                                 std::size_t n_paths_total, const FieldVisitor& visit) const {
    const std::size_t begin = static_cast<std::size_t>(chunk_index) * kChunkSize2D;
    if (begin >= n_paths_total) return;
    const std::size_t count = std::min(kChunkSize2D, n_paths_total - begin);

    NormalSampler rng(chunk_seed(master_seed, chunk_index));
    const std::size_t mx = 2 * kx_max_ + 1;
    const std::size_t my = 2 * ky_max_ + 1;

    std::vector<double> z_re(my * mx), z_im(my * mx);
    std::vector<double> a_re(my * nx_), a_im(my * nx_);
    std::vector<double> f_re(ny_ * nx_), f_im(ny_ * nx_);

    for (std::size_t p = 0; p < count; p += 2) {
        // spectral draw, (ky, kx) lexicographic
        for (std::size_t i = 0; i < my * mx; ++i) {
            double z0, z1;
            rng.pair(z0, z1);
            z_re[i] = amp_[i] * z0;
            z_im[i] = amp_[i] * z1;
        }
        // A[ky][jx] = sum_kx Z[ky][kx] Ex[jx][kx]
        for (std::size_t iy = 0; iy < my; ++iy) {
            const double* zr = z_re.data() + iy * mx;
            const double* zi = z_im.data() + iy * mx;
            double* ar = a_re.data() + iy * nx_;
            double* ai = a_im.data() + iy * nx_;
            for (std::size_t jx = 0; jx < nx_; ++jx) {
                const double* er = ex_re_.data() + jx * mx;
                const double* ei = ex_im_.data() + jx * mx;
                double sr = 0.0, si = 0.0;
                for (std::size_t ix = 0; ix < mx; ++ix) {
                    sr += zr[ix] * er[ix] - zi[ix] * ei[ix];
                    si += zr[ix] * ei[ix] + zi[ix] * er[ix];
                }
                ar[jx] = sr;
                ai[jx] = si;
            }
        }
        // F[jy][jx] = sum_ky Ey[jy][ky] A[ky][jx]
        std::fill(f_re.begin(), f_re.end(), 0.0);
        std::fill(f_im.begin(), f_im.end(), 0.0);
        for (std::size_t jy = 0; jy < ny_; ++jy) {
            double* fr = f_re.data() + jy * nx_;
            double* fi = f_im.data() + jy * nx_;
            const double* eyr = ey_re_.data() + jy * my;
            const double* eyi = ey_im_.data() + jy * my;
            for (std::size_t iy = 0; iy < my; ++iy) {
                const double cr = eyr[iy];
                const double ci = eyi[iy];
                const double* ar = a_re.data() + iy * nx_;
                const double* ai = a_im.data() + iy * nx_;
                for (std::size_t jx = 0; jx < nx_; ++jx) {
                    fr[jx] += cr * ar[jx] - ci * ai[jx];
                    fi[jx] += cr * ai[jx] + ci * ar[jx];
                }
            }
        }
        SeedLineage lin{master_seed, chunk_index, static_cast<std::uint32_t>(p)};
        visit(std::span<const double>(f_re.data(), ny_ * nx_), lin);
        if (p + 1 < count) {
            lin.index_in_chunk = static_cast<std::uint32_t>(p + 1);
            visit(std::span<const double>(f_im.data(), ny_ * nx_), lin);
        }
    }
}

void GridSampler2D::sample(std::size_t n_paths, std::uint64_t master_seed,
                           const FieldVisitor& visit) const {
    const std::size_t chunks = chunk_count(n_paths);
    for (std::size_t c = 0; c < chunks; ++c) {
        sample_chunk(master_seed, c, n_paths, visit);
    }
}

int excursion_ec_1d(std::span<const double> values, double u) {
    int runs = 0;
    bool in_run = false;
    for (double v : values) {
        const bool above = v >= u;
        if (above && !in_run) ++runs;
        in_run = above;
    }
    return runs;
}

void excursion_ec_1d_multi(std::span<const double> values,
                           std::span<const double> levels_ascending,
                           std::span<std::int32_t> out) {
    const std::size_t m = levels_ascending.size();
    for (std::size_t j = 0; j < m; ++j) out[j] = 0;
    if (m == 0) return;
    const double u0 = levels_ascending[0];
    std::size_t prev = 0;  // number of levels on at the previous sample
    for (double v : values) {
        std::size_t cur = 0;
        if (v >= u0) {
            cur = 1;
            while (cur < m && v >= levels_ascending[cur]) ++cur;
        }
        for (std::size_t j = prev; j < cur; ++j) ++out[j];
        prev = cur;
    }
}

long excursion_ec_2d(std::span<const double> values, std::size_t nx, std::size_t ny,
                     double u) {
    long v_cnt = 0, e_cnt = 0, f_cnt = 0;
    std::vector<char> prev(nx, 0), cur(nx, 0);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double* row = values.data() + iy * nx;
        for (std::size_t ix = 0; ix < nx; ++ix) cur[ix] = row[ix] >= u ? 1 : 0;
        for (std::size_t ix = 0; ix < nx; ++ix) v_cnt += cur[ix];
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) e_cnt += cur[ix] & cur[ix + 1];
        if (iy > 0) {
            for (std::size_t ix = 0; ix < nx; ++ix) e_cnt += prev[ix] & cur[ix];
            for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
                f_cnt += prev[ix] & prev[ix + 1] & cur[ix] & cur[ix + 1];
            }
        }
        std::swap(prev, cur);
    }
    return v_cnt - e_cnt + f_cnt;
}

double sup_on_grid(std::span<const double> values) {
    double m = values[0];
    for (double v : values) m = std::max(m, v);
    return m;
}

}  // namespace ecfield
