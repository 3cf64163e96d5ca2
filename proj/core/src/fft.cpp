#include "ecfield/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace ecfield {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("Fft: size must be positive");

    bluestein_ = !is_power_of_two(n);
    pot_ = bluestein_ ? next_power_of_two(2 * n - 1) : n;

    // bit-reversal permutation and twiddles for the radix-2 engine
    bitrev_.assign(pot_, 0);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < pot_) ++log2n;
    for (std::size_t i = 0; i < pot_; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1u) << (log2n - 1 - b);
        bitrev_[i] = r;
    }
    tw_re_.assign(pot_ / 2, 0.0);
    tw_im_.assign(pot_ / 2, 0.0);
    for (std::size_t k = 0; k < pot_ / 2; ++k) {
        const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(pot_);
        tw_re_[k] = std::cos(ang);
        tw_im_[k] = std::sin(ang);
    }

    if (bluestein_) {
        // chirp a_j = exp(-i pi j^2 / n); compute j^2 mod 2n incrementally to
        // keep the angle argument small for large n.
        chirp_re_.assign(n_, 0.0);
        chirp_im_.assign(n_, 0.0);
        const std::size_t mod = 2 * n_;
        std::size_t q = 0;  // j^2 mod 2n
        for (std::size_t j = 0; j < n_; ++j) {
            const double ang = -kTwoPi * static_cast<double>(q) / static_cast<double>(mod);
            chirp_re_[j] = std::cos(ang);
            chirp_im_[j] = std::sin(ang);
            q += 2 * j + 1;
            while (q >= mod) q -= mod;
        }
        // kernel b_j = conj(chirp) extended symmetrically, transformed once
        ker_re_.assign(pot_, 0.0);
        ker_im_.assign(pot_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            ker_re_[j] = chirp_re_[j];
            ker_im_[j] = -chirp_im_[j];
            if (j > 0) {
                ker_re_[pot_ - j] = chirp_re_[j];
                ker_im_[pot_ - j] = -chirp_im_[j];
            }
        }
        radix2(ker_re_.data(), ker_im_.data());
    }
}

void Fft::radix2(double* re, double* im) const {
    const std::size_t n = pot_;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bitrev_[i];
        if (j > i) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            std::size_t tw = 0;
            for (std::size_t k = 0; k < half; ++k, tw += step) {
                const double wr = tw_re_[tw];
                const double wi = tw_im_[tw];
                const std::size_t a = base + k;
                const std::size_t b = a + half;
                const double xr = re[b] * wr - im[b] * wi;
                const double xi = re[b] * wi + im[b] * wr;
                re[b] = re[a] - xr;
                im[b] = im[a] - xi;
                re[a] += xr;
                im[a] += xi;
            }
        }
    }
}

void Fft::forward(double* re, double* im) const {
    if (!bluestein_) {
        radix2(re, im);
        return;
    }
    // y_j = x_j * chirp_j, zero padded to pot_
    std::vector<double> yr(pot_, 0.0), yi(pot_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        yr[j] = re[j] * chirp_re_[j] - im[j] * chirp_im_[j];
        yi[j] = re[j] * chirp_im_[j] + im[j] * chirp_re_[j];
    }
    radix2(yr.data(), yi.data());
    // convolve with kernel, then inverse transform via conjugation
    for (std::size_t k = 0; k < pot_; ++k) {
        const double r = yr[k] * ker_re_[k] - yi[k] * ker_im_[k];
        const double i = yr[k] * ker_im_[k] + yi[k] * ker_re_[k];
        yr[k] = r;
        yi[k] = -i;
    }
    radix2(yr.data(), yi.data());
    const double scale = 1.0 / static_cast<double>(pot_);
    for (std::size_t j = 0; j < n_; ++j) {
        const double cr = yr[j] * scale;
        const double ci = -yi[j] * scale;
        re[j] = cr * chirp_re_[j] - ci * chirp_im_[j];
        im[j] = cr * chirp_im_[j] + ci * chirp_re_[j];
    }
}

void Fft::inverse(double* re, double* im) const {
    for (std::size_t j = 0; j < n_; ++j) im[j] = -im[j];
    forward(re, im);
    for (std::size_t j = 0; j < n_; ++j) im[j] = -im[j];
}

}  // namespace ecfield
