#include "griddisc/bench.hpp"

#include "griddisc/errors.hpp"
#include "griddisc/log.hpp"
#include "griddisc/node.hpp"
#include "griddisc/rpc_client.hpp"
#include "griddisc/udp_proxy.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <thread>

namespace griddisc {

using nlohmann::json;

namespace {

std::filesystem::path ensure_scratch(const BenchSpec& spec) {
    if (!spec.scratch_dir.empty()) {
        std::filesystem::create_directories(spec.scratch_dir);
        return spec.scratch_dir;
    }
    auto base = std::filesystem::temp_directory_path() / "griddisc-bench-XXXXXX";
    std::string tmpl = base.string();
    if (!::mkdtemp(tmpl.data())) throw IoFailure("mkdtemp " + tmpl);
    return tmpl;
}

NodeConfig bench_node_config(const BenchSpec& spec, const BackendDescriptor& backend) {
    NodeConfig cfg;
    cfg.http_bind = {"127.0.0.1", 0};
    cfg.udp_bind = {"127.0.0.1", 0};
    cfg.backend = backend;
    cfg.repush_secs = spec.repush_secs;
    cfg.log_level = "warn";
    return cfg;
}

void check_rpc(const RpcResult& r, const std::string& what) {
    if (!r.ok)
        throw Error(Errc::protocol_error,
                    what + " failed: " + std::to_string(r.error_code) + " " + r.error_message);
}

json synthetic_service(int i) {
    // Fixed payload shape so the response size scales only with count.
    return json{{"name", "svc-" + std::to_string(i)},
                {"server_url", "http://bench.local:8080"},
                {"methods", {"describe", "invoke"}},
                {"attributes", {{"tier", "bench"}}},
                {"lease_secs", 86400}};
}

void validate_spec(const BenchSpec& spec) {
    if (spec.trials_per_point < 1) throw ConfigError("trials must be >= 1");
    if (spec.attempts < 1) throw ConfigError("attempts must be >= 1");
    if (spec.poll_interval_ms < 1) throw ConfigError("poll-interval must be >= 1 ms");
    int prev = -1;
    for (int n : spec.service_counts) {
        if (n < 0 || n <= prev)
            throw ConfigError("service counts must be non-negative and ascending");
        prev = n;
    }
    if (spec.impairment &&
        (spec.impairment->loss_fraction < 0.0 || spec.impairment->loss_fraction >= 1.0))
        throw ConfigError("loss fraction must be in [0, 1)");
}

} // namespace

BenchResult run_retrieval_bench(const BenchSpec& spec) {
    validate_spec(spec);
    auto scratch = ensure_scratch(spec);
    const bool persistent = spec.backend.kind == BackendDescriptor::Kind::persistent;
    const std::string label = persistent ? "retrieval-persistent" : "retrieval-memory";

    BenchResult result;
    const Micros bench_start = steady_micros();

    for (int count : spec.service_counts) {
        BackendDescriptor backend = spec.backend;
        if (persistent) backend.location = scratch / ("retrieval-" + std::to_string(count));

        Node node(bench_node_config(spec, backend));
        node.start();
        RpcClient client("127.0.0.1", node.http_port(), 30000);

        for (int i = 0; i < count; ++i)
            check_rpc(client.call("discovery.register", synthetic_service(i)),
                      "register svc-" + std::to_string(i));
        // connection established and warmed before any timed call; the
        // untimed finds also warm the scan and serialization paths
        client.warm_up();
        for (int i = 0; i < 3; ++i) check_rpc(client.call("discovery.find", json::object()), "warm find");

        std::vector<Micros> point;
        point.reserve(spec.trials_per_point);
        for (int trial = 0; trial < spec.trials_per_point; ++trial) {
            RpcResult r = client.call("discovery.find", json::object());
            check_rpc(r, "find at count " + std::to_string(count));
            if (static_cast<int>(r.result.size()) != count)
                throw Error(Errc::protocol_error,
                            "find returned " + std::to_string(r.result.size()) + " records, want " +
                                std::to_string(count));
            result.samples.push_back(LatencySample{label, count, trial, r.latency_micros,
                                                   SystemClock::instance().now_micros()});
            point.push_back(r.latency_micros);
        }
        result.summaries.push_back(SummaryRow{count, summarize(std::move(point))});
        node.stop();
        GD_LOG_INFO("bench: ", label, " n=", count,
                    " mean=", result.summaries.back().summary.mean, "us");
    }
    result.elapsed_micros = steady_micros() - bench_start;
    return result;
}

BenchResult run_replication_bench(const BenchSpec& spec) {
    validate_spec(spec);
    BenchResult result;
    const Micros bench_start = steady_micros();

    Node node_b(bench_node_config(spec, BackendDescriptor::memory()));
    node_b.start();

    std::unique_ptr<UdpProxy> proxy;
    Endpoint push_target{"127.0.0.1", node_b.udp_port()};
    if (spec.impairment) {
        proxy = std::make_unique<UdpProxy>(push_target, spec.impairment->loss_fraction,
                                           spec.impairment->added_delay_ms, spec.impairment->seed);
        proxy->start();
        push_target = Endpoint{"127.0.0.1", proxy->port()};
    }

    NodeConfig cfg_a = bench_node_config(spec, BackendDescriptor::memory());
    cfg_a.peers.mode = PeerSet::Mode::mesh;
    cfg_a.peers.endpoints = {push_target};
    Node node_a(cfg_a);
    node_a.start();

    RpcClient client_a("127.0.0.1", node_a.http_port(), 30000);
    RpcClient client_b("127.0.0.1", node_b.http_port(), 30000);
    client_a.warm_up();
    client_b.warm_up();

    for (int attempt = 0; attempt < spec.attempts; ++attempt) {
        const std::string marker = std::to_string(attempt);
        json params{{"name", "svc-rep"},
                    {"server_url", "http://a.local:8080"},
                    {"methods", {"ping"}},
                    {"attributes", {{"attempt", marker}}},
                    {"lease_secs", 3600}};
        const Micros t0 = steady_micros();
        check_rpc(client_a.call("discovery.register", params), "register attempt " + marker);

        const Micros deadline = t0 + Micros(spec.visibility_timeout_ms) * 1000;
        bool visible = false;
        while (steady_micros() < deadline) {
            RpcResult r =
                client_b.call("discovery.find_key", json{{"key", "attempt"}, {"value", marker}});
            check_rpc(r, "poll attempt " + marker);
            if (!r.result.empty()) {
                visible = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(spec.poll_interval_ms));
        }
        if (!visible) {
            ++result.lost;
            GD_LOG_WARN("bench: attempt ", attempt, " lost (not visible within ",
                        spec.visibility_timeout_ms, " ms)");
            continue;
        }
        result.samples.push_back(LatencySample{"replication", attempt, 0,
                                               steady_micros() - t0,
                                               SystemClock::instance().now_micros()});
    }

    if (!result.samples.empty()) {
        std::vector<Micros> all;
        all.reserve(result.samples.size());
        for (const auto& s : result.samples) all.push_back(s.latency_micros);
        SummaryRow row{0, summarize(std::move(all))};
        row.summary.lost = result.lost;
        result.summaries.push_back(row);
    }

    node_a.stop();
    if (proxy) proxy->stop();
    node_b.stop();
    result.elapsed_micros = steady_micros() - bench_start;
    return result;
}

void write_csv(const BenchResult& result, std::ostream& out) {
    out << "experiment,x,trial,latency_micros,timestamp_micros\n";
    for (const auto& s : result.samples)
        out << s.experiment << ',' << s.x << ',' << s.trial << ',' << s.latency_micros << ','
            << s.timestamp_micros << '\n';
    out << "# summary\n";
    out << "# x,min,mean,p50,p95,max,lost\n";
    char mean[32];
    for (const auto& row : result.summaries) {
        std::snprintf(mean, sizeof(mean), "%.1f", row.summary.mean);
        out << "# " << row.x << ',' << row.summary.min << ',' << mean << ',' << row.summary.p50
            << ',' << row.summary.p95 << ',' << row.summary.max << ',' << row.summary.lost << '\n';
    }
}

void write_csv(const BenchResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + path.string());
    write_csv(result, out);
}

} // namespace griddisc
