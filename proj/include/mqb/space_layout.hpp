// space_layout.hpp — fixed tensor-factor layout of the qudit (x) Fock product space
//
// Factor order is immutable: qudit first, then modes in ascending order. The
// qudit index is the slowest-running index, so each electronic state owns a
// contiguous block of the basis.

#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mqb {

class SpaceLayout {
public:
    SpaceLayout(int qudit_levels, std::vector<int> truncations)
        : d_(qudit_levels), trunc_(std::move(truncations)) {
        if (d_ < 1) throw std::invalid_argument("SpaceLayout: qudit levels must be >= 1");
        for (std::size_t j = 0; j < trunc_.size(); ++j) {
            if (trunc_[j] < 2)
                throw std::invalid_argument("SpaceLayout: truncation of mode " +
                                            std::to_string(j) + " must be >= 2");
        }
        dim_ = d_;
        for (int n : trunc_) dim_ *= n;
        // strides[f]: step in the flat index when factor f advances by one
        strides_.assign(num_factors(), 1);
        for (int f = num_factors() - 2; f >= 0; --f)
            strides_[f] = strides_[f + 1] * factor_dim(f + 1);
    }

    int qudit_levels() const { return d_; }
    int num_modes() const { return static_cast<int>(trunc_.size()); }
    int truncation(int mode) const { return trunc_.at(mode); }
    const std::vector<int>& truncations() const { return trunc_; }
    long dim() const { return dim_; }

    // Factor 0 is the qudit; factor j in [1, N] is mode j-1.
    int num_factors() const { return 1 + num_modes(); }
    int factor_dim(int f) const {
        if (f < 0 || f >= num_factors())
            throw std::out_of_range("SpaceLayout: factor index out of range");
        return f == 0 ? d_ : trunc_[f - 1];
    }
    long stride(int f) const {
        if (f < 0 || f >= num_factors())
            throw std::out_of_range("SpaceLayout: factor index out of range");
        return strides_[f];
    }

    int qudit_index_of(long basis) const { return static_cast<int>(basis / strides_[0]); }
    int fock_index_of(long basis, int mode) const {
        return static_cast<int>((basis / strides_[mode + 1]) % trunc_[mode]);
    }

    bool operator==(const SpaceLayout& other) const {
        return d_ == other.d_ && trunc_ == other.trunc_;
    }
    bool operator!=(const SpaceLayout& other) const { return !(*this == other); }

private:
    int d_;
    std::vector<int> trunc_;
    long dim_;
    std::vector<long> strides_;
};

}  // namespace mqb
