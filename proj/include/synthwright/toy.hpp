#ifndef SYNTHWRIGHT_TOY_HPP
#define SYNTHWRIGHT_TOY_HPP

#include <cstdint>

#include "synthwright/dataset.hpp"

namespace synthwright {

// Six-feature worked example with known ground truth, plus a "loan" label.
// Dependencies by construction:
//   gender, age-grp  -> education   (conditional category ratios)
//   education        -> marital     (married rate by education)
//   education, intelligence -> salary (additive shifts on a uniform base)
//   loan = yes iff salary + 3000 * [gender == M] > 19000
// The {F, senior} education ratios are primary:secondary:tertiary = 1:2:3.
Dataset make_toy_dataset(std::size_t n, std::uint64_t seed);

} // namespace synthwright

#endif
