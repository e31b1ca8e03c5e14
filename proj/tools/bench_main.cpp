#include "griddisc/bench.hpp"
#include "griddisc/errors.hpp"
#include "griddisc/log.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace griddisc;

int main(int argc, char** argv) {
    CLI::App app{"griddisc-bench: reproduce the retrieval and replication experiments"};
    app.require_subcommand(1);

    BenchSpec spec;
    std::string out_path;
    std::string backend = "memory";
    std::string counts;
    double loss = 0.0;
    int delay_ms = 0;
    std::uint64_t seed = 1;
    std::string log_level = "info";

    CLI::App* retrieval = app.add_subcommand("retrieval", "find latency vs service count");
    retrieval->add_option("--backend", backend, "memory or persistent")
        ->check(CLI::IsMember({"memory", "persistent"}));
    retrieval->add_option("--counts", counts, "comma-separated service counts");
    retrieval->add_option("--trials", spec.trials_per_point, "timed find calls per count");
    retrieval->add_option("--out", out_path, "output CSV path")->required();

    CLI::App* replication = app.add_subcommand("replication", "register-to-visible latency, A to B");
    replication->add_option("--attempts", spec.attempts, "number of attempts");
    replication->add_option("--loss", loss, "impairment: drop probability [0,1)");
    replication->add_option("--delay-ms", delay_ms, "impairment: added delay per datagram");
    replication->add_option("--poll-interval-ms", spec.poll_interval_ms, "visibility poll interval");
    replication->add_option("--visibility-timeout-ms", spec.visibility_timeout_ms,
                            "per-attempt timeout before reporting it lost");
    replication->add_option("--repush-secs", spec.repush_secs, "enable periodic re-push (0 = off)");
    replication->add_option("--seed", seed, "impairment RNG seed");
    replication->add_option("--out", out_path, "output CSV path")->required();

    app.add_option("--scratch-dir", spec.scratch_dir, "working directory for node data");
    app.add_option("--log-level", log_level, "error|warn|info|debug");

    CLI11_PARSE(app, argc, argv);

    try {
        set_log_level(log_level);
        BenchResult result;
        if (retrieval->parsed()) {
            spec.experiment = BenchSpec::Experiment::retrieval;
            spec.backend = backend == "persistent"
                               ? BackendDescriptor::persistent({}) // located under scratch
                               : BackendDescriptor::memory();
            if (!counts.empty()) {
                spec.service_counts.clear();
                std::stringstream ss(counts);
                std::string item;
                while (std::getline(ss, item, ',')) spec.service_counts.push_back(std::stoi(item));
            }
            result = run_retrieval_bench(spec);
        } else {
            spec.experiment = BenchSpec::Experiment::replication;
            if (loss > 0.0 || delay_ms > 0) spec.impairment = Impairment{loss, delay_ms, seed};
            result = run_replication_bench(spec);
        }
        write_csv(result, std::filesystem::path(out_path));

        std::printf("samples: %zu, lost: %zu, elapsed: %.1f s\n", result.samples.size(),
                    result.lost, result.elapsed_micros / 1e6);
        for (const auto& row : result.summaries)
            std::printf("x=%lld  min=%lld  mean=%.1f  p50=%lld  p95=%lld  max=%lld  lost=%zu\n",
                        static_cast<long long>(row.x), static_cast<long long>(row.summary.min),
                        row.summary.mean, static_cast<long long>(row.summary.p50),
                        static_cast<long long>(row.summary.p95),
                        static_cast<long long>(row.summary.max), row.summary.lost);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "griddisc-bench: %s\n", e.what());
        return 1;
    }
}
