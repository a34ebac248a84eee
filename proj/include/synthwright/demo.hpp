#ifndef SYNTHWRIGHT_DEMO_HPP
#define SYNTHWRIGHT_DEMO_HPP

#include <cstdint>
#include <ostream>
#include <string>

namespace synthwright {

// End-to-end walkthrough on the built-in toy data: generate, infer, plan,
// synthesize, train a tree, run all three property tests, assess. Writes
// every artifact under out_dir and a human-readable narration to `out`.
// Deterministic: same seed, byte-identical artifacts.
void run_demo(const std::string& out_dir, std::uint64_t seed, std::size_t rows,
              std::ostream& out);

} // namespace synthwright

#endif
