#ifndef GRADKIT_REPORT_HPP
#define GRADKIT_REPORT_HPP

#include <cstdint>
#include <string>

namespace gradkit::report {

// Runs the full reproduction suite (field design numbers, chain spacings,
// splittings, crosstalk, fits on the shipped fixture, coherence Monte Carlo)
// and renders a fixed-format summary table. Deterministic: the same seed and
// build produce byte-identical output.
std::string run(std::uint64_t seed, const std::string& data_dir);

}  // namespace gradkit::report

#endif
