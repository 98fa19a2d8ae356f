#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omegalab/finset.hpp"
#include "omegalab/rng.hpp"

namespace omegalab {

// A bijection of {0, ..., N-1} with its inverse cached.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)), inverse_(image_.size()) {
    std::vector<bool> seen(image_.size(), false);
    for (std::size_t x = 0; x < image_.size(); ++x) {
      std::size_t y = image_[x];
      if (y >= image_.size() || seen[y]) throw std::invalid_argument("map is not a permutation");
      seen[y] = true;
      inverse_[y] = x;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> image(n);
    std::iota(image.begin(), image.end(), std::size_t{0});
    return Permutation(std::move(image));
  }

  static Permutation random(std::size_t n, Rng& rng) {
    std::vector<std::size_t> image(n);
    std::iota(image.begin(), image.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(image));
    return Permutation(std::move(image));
  }

  std::size_t size() const { return image_.size(); }
  std::size_t operator()(std::size_t x) const { return image_.at(x); }
  std::size_t inverse_at(std::size_t y) const { return inverse_.at(y); }

  Permutation inverse() const { return Permutation(inverse_); }

  // (this ∘ other)(x) = this(other(x))
  Permutation compose(const Permutation& other) const {
    if (other.size() != size()) throw std::invalid_argument("composing permutations of different sizes");
    std::vector<std::size_t> image(size());
    for (std::size_t x = 0; x < size(); ++x) image[x] = image_[other.image_[x]];
    return Permutation(std::move(image));
  }

  // π^power for any integer power.
  Permutation power(long long power) const {
    Permutation base = power < 0 ? inverse() : *this;
    unsigned long long e = power < 0 ? static_cast<unsigned long long>(-power) : static_cast<unsigned long long>(power);
    Permutation out = identity(size());
    while (e > 0) {
      if (e & 1u) out = out.compose(base);
      base = base.compose(base);
      e >>= 1;
    }
    return out;
  }

  bool is_identity() const {
    for (std::size_t x = 0; x < size(); ++x) {
      if (image_[x] != x) return false;
    }
    return true;
  }

  // π[A]
  FinSet image_of(const FinSet& a) const {
    if (a.universe() != size()) throw std::invalid_argument("set and permutation live in different universes");
    FinSet out(size());
    for (std::size_t x : a.members()) out.insert(image_[x]);
    return out;
  }

  // Swaps the images of x and y.
  void swap_images(std::size_t x, std::size_t y) {
    std::swap(image_.at(x), image_.at(y));
    inverse_[image_[x]] = x;
    inverse_[image_[y]] = y;
  }

  const std::vector<std::size_t>& images() const { return image_; }

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.image_ == b.image_; }

 private:
  std::vector<std::size_t> image_;
  std::vector<std::size_t> inverse_;
};

}  // namespace omegalab
