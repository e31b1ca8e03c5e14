#pragma once

#include "griddisc/stats.hpp"
#include "griddisc/store.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace griddisc {

struct Impairment {
    double loss_fraction = 0.0; // [0, 1)
    int added_delay_ms = 0;
    std::uint64_t seed = 1;
};

struct BenchSpec {
    enum class Experiment { retrieval, replication };

    Experiment experiment = Experiment::retrieval;

    // retrieval
    BackendDescriptor backend = BackendDescriptor::memory();
    std::vector<int> service_counts{100, 500, 1000, 2000, 5000};
    int trials_per_point = 20;

    // replication
    int attempts = 50;
    int poll_interval_ms = 5;
    int visibility_timeout_ms = 10000;
    int repush_secs = 0; // anti-entropy re-push off unless asked for
    std::optional<Impairment> impairment;

    // persistent-backend files and node scratch; a temp dir when empty
    std::filesystem::path scratch_dir;
};

struct LatencySample {
    std::string experiment;
    std::int64_t x = 0; // service count, or attempt index
    int trial = 0;
    Micros latency_micros = 0;
    Micros timestamp_micros = 0;
};

struct SummaryRow {
    std::int64_t x = 0;
    Summary summary;
};

struct BenchResult {
    std::vector<LatencySample> samples;
    std::vector<SummaryRow> summaries;
    std::size_t lost = 0;
    Micros elapsed_micros = 0;
};

// Fig 2/3 analogue: retrieval latency vs registered-service count against
// one backend. Timing excludes connection setup (the client connection is
// established and warmed before the timed calls).
BenchResult run_retrieval_bench(const BenchSpec& spec);

// Fig 4 analogue: per-attempt time from register-at-A to visible-at-B over
// loopback replication, optionally through the impairment proxy. Attempts
// that stay invisible past the visibility timeout are reported as lost.
BenchResult run_replication_bench(const BenchSpec& spec);

// CSV: header row, one line per sample, then a '#'-prefixed summary block.
void write_csv(const BenchResult& result, std::ostream& out);
void write_csv(const BenchResult& result, const std::filesystem::path& path);

} // namespace griddisc
