#pragma once

#include <cstddef>
#include <vector>

namespace ecfield {

// Complex DFT on split real/imaginary arrays. Power-of-two sizes run the
// iterative radix-2 kernel; everything else goes through Bluestein's chirp
// transform on top of it. Plans are immutable after construction and safe to
// share across threads; transforms write only caller-owned buffers.
class Fft {
public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }

    // X_k = sum_j x_j exp(-2 pi i j k / n), in place.
    void forward(double* re, double* im) const;

    // Unnormalized inverse: x_j = sum_k X_k exp(+2 pi i j k / n), in place.
    void inverse(double* re, double* im) const;

    static bool is_power_of_two(std::size_t n) {
        return n != 0 && (n & (n - 1)) == 0;
    }

private:
    void radix2(double* re, double* im) const;  // size n_, forward sign

    std::size_t n_ = 0;

    // radix-2 tables (power-of-two path and Bluestein's inner engine)
    std::size_t pot_ = 0;                 // power-of-two transform length
    std::vector<std::size_t> bitrev_;
    std::vector<double> tw_re_, tw_im_;   // twiddles, one half-size table

    // Bluestein state (empty when n_ is a power of two)
    bool bluestein_ = false;
    std::vector<double> chirp_re_, chirp_im_;  // a_j chirp, length n_
    std::vector<double> ker_re_, ker_im_;      // FFT of symmetric chirp kernel
};

}  // namespace ecfield
