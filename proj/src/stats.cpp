#include "griddisc/stats.hpp"

#include "griddisc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace griddisc {

Micros nearest_rank(const std::vector<Micros>& sorted, double percentile) {
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(sorted.size())));
    if (rank == 0) rank = 1;
    return sorted[rank - 1];
}

Summary summarize(std::vector<Micros> samples) {
    if (samples.empty()) throw EmptyInput("summarize needs at least one sample");
    std::sort(samples.begin(), samples.end());
    Summary s;
    s.count = samples.size();
    s.min = samples.front();
    s.max = samples.back();
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
             static_cast<double>(samples.size());
    s.p50 = nearest_rank(samples, 50.0);
    s.p95 = nearest_rank(samples, 95.0);
    return s;
}

} // namespace griddisc
