#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace spi {

// Dense bitset over the cases of a dataset.
class CaseSet {
public:
    CaseSet() = default;
    explicit CaseSet(std::size_t size, bool value = false)
        : size_(size), words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
        trim();
    }

    std::size_t size() const { return size_; }

    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

    void set(std::size_t i, bool value = true) {
        const std::uint64_t bit = std::uint64_t{1} << (i % 64);
        if (value) {
            words_[i / 64] |= bit;
        } else {
            words_[i / 64] &= ~bit;
        }
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    CaseSet& operator&=(const CaseSet& other) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
        return *this;
    }

    friend CaseSet operator&(CaseSet a, const CaseSet& b) { return a &= b; }

    CaseSet complement() const {
        CaseSet out = *this;
        for (auto& w : out.words_) w = ~w;
        out.trim();
        return out;
    }

    /// |a & b| without materializing the intersection.
    friend std::size_t intersection_count(const CaseSet& a, const CaseSet& b) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < a.words_.size(); ++i) {
            n += static_cast<std::size_t>(std::popcount(a.words_[i] & b.words_[i]));
        }
        return n;
    }

    friend bool operator==(const CaseSet&, const CaseSet&) = default;

private:
    void trim() {
        if (size_ % 64 != 0 && !words_.empty()) {
            words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
        }
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace spi
