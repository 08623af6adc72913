#include "hsaw/saw.hpp"

#include <algorithm>

namespace hsaw {

std::map<std::uint64_t, std::uint64_t> fiber_histogram(const ReflectionTable& t, int i) {
  if (i < 1 || i >= t.n) throw Error("reflection index must satisfy 0 < i < n");
  const std::size_t m = static_cast<std::size_t>(t.n) - 1;
  std::vector<WalkCode> img(t.size());
  for (std::size_t w = 0; w < t.size(); ++w) img[w] = t.image[w * m + static_cast<std::size_t>(i) - 1];
  std::sort(img.begin(), img.end());

  std::map<std::uint64_t, std::uint64_t> hist;
  std::uint64_t hit = 0;
  for (std::size_t a = 0; a < img.size();) {
    std::size_t b = a;
    while (b < img.size() && img[b] == img[a]) ++b;
    ++hist[b - a];
    ++hit;
    a = b;
  }
  if (hit < t.size()) hist[0] += t.size() - hit;
  return hist;
}

bool images_in_lambda(const ReflectionTable& t) {
  if (t.invalid_images != 0) return false;
  // codes are sorted in enumeration order, so membership is a binary search
  return std::all_of(t.image.begin(), t.image.end(),
                     [&](WalkCode c) { return std::binary_search(t.code.begin(), t.code.end(), c); });
}

std::string to_string(MoveSet m) { return m == MoveSet::reflections ? "reflections" : "dihedral"; }

MoveSet parse_move_set(const std::string& s) {
  if (s == "reflections") return MoveSet::reflections;
  if (s == "dihedral") return MoveSet::dihedral;
  throw Error("unknown move set '" + s + "' (reflections|dihedral)");
}

}  // namespace hsaw
