#pragma once

#include "griddisc/clock.hpp"

#include <cstdint>
#include <vector>

namespace griddisc {

// Exact order statistics over latency samples; percentiles use the
// nearest-rank rule (ceil(p/100 * N)-th smallest).
struct Summary {
    Micros min = 0;
    double mean = 0.0;
    Micros p50 = 0;
    Micros p95 = 0;
    Micros max = 0;
    std::size_t count = 0;
    std::size_t lost = 0;
};

// Throws EmptyInput for an empty sample set.
Summary summarize(std::vector<Micros> samples);

Micros nearest_rank(const std::vector<Micros>& sorted, double percentile);

} // namespace griddisc
