#include "griddisc/registry.hpp"

#include "griddisc/errors.hpp"
#include "griddisc/wire.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <set>

using namespace griddisc;
using testsup::counter_ids;
using testsup::test_id;

namespace {

Registry make_registry(std::int64_t tombstone_window_secs = 3600,
                       std::optional<std::size_t> capacity = std::nullopt) {
    RegistryOptions opts;
    opts.tombstone_window_secs = tombstone_window_secs;
    opts.id_gen = counter_ids();
    return Registry(open_store(BackendDescriptor::memory(capacity)), test_id(0xA0), opts);
}

RecordInput input(std::string name, std::string server = "http://a:8080",
                  std::vector<std::string> methods = {"add"},
                  std::vector<std::pair<std::string, std::string>> attrs = {}) {
    return RecordInput{std::move(name), std::move(server), std::move(methods), std::move(attrs)};
}

} // namespace

TEST_CASE("register stores a live record visible to find") {
    Registry reg = make_registry();
    const Micros now = 10'000'000;
    ServiceRecord rec = reg.register_service(input("calc"), 300, now);

    CHECK(rec.lease.expires_at == now + 300 * kMicrosPerSec);
    CHECK_FALSE(rec.tombstone);
    QueryFilter f;
    f.name_pattern = "calc";
    auto found = reg.find(f, now);
    REQUIRE(found.size() == 1);
    CHECK(found[0] == rec);
}

TEST_CASE("register validation") {
    Registry reg = make_registry();
    CHECK_THROWS_AS(reg.register_service(input(""), 300, 0), InvalidRecord);
    CHECK_THROWS_AS(reg.register_service(input("x", "s", {}, {{"k", "1"}, {"k", "2"}}), 300, 0),
                    InvalidRecord);
    CHECK_THROWS_AS(reg.register_service(input("x"), 0, 0), LeaseOutOfRange);
    CHECK_THROWS_AS(reg.register_service(input("x"), kMaxLeaseSecs + 1, 0), LeaseOutOfRange);
}

TEST_CASE("a record that cannot fit one replication datagram is rejected") {
    Registry reg = make_registry();
    RecordInput big = input("big");
    big.methods.assign(300, std::string(30, 'm'));
    CHECK_THROWS_AS(reg.register_service(big, 300, 0), InvalidRecord);
}

TEST_CASE("1000 registrations are all individually findable and counted") {
    Registry reg = make_registry();
    std::vector<Id128> issued; // independent shadow list
    for (int i = 0; i < 1000; ++i)
        issued.push_back(reg.register_service(input("svc-" + std::to_string(i)), 600, 50).service_id);

    auto all = reg.find(QueryFilter{}, 100);
    CHECK(all.size() == issued.size());
    std::set<Id128> got;
    for (const auto& r : all) got.insert(r.service_id);
    CHECK(got == std::set<Id128>(issued.begin(), issued.end()));
}

TEST_CASE("renew replaces the lease and advances the stamp") {
    Registry reg = make_registry();
    ServiceRecord rec = reg.register_service(input("calc"), 10, 1'000'000);

    // 1s before expiry
    const Micros t = rec.lease.expires_at - kMicrosPerSec;
    Lease renewed = reg.renew(rec.service_id, 300, t);
    CHECK(renewed.granted_at == t);
    CHECK(renewed.expires_at == t + 300 * kMicrosPerSec);

    QueryFilter f;
    f.name_pattern = "calc";
    auto found = reg.find(f, t);
    REQUIRE(found.size() == 1);
    CHECK(rec.stamp < found[0].stamp);
}

TEST_CASE("renew after expiry is NotFound; expired records cannot resurrect") {
    Registry reg = make_registry();
    ServiceRecord rec = reg.register_service(input("calc"), 1, 0);
    CHECK_THROWS_AS(reg.renew(rec.service_id, 300, rec.lease.expires_at), NotFound);
    CHECK_THROWS_AS(reg.renew(rec.service_id, 300, rec.lease.expires_at + 5), NotFound);
    CHECK_THROWS_AS(reg.renew(test_id(999), 300, 0), NotFound); // unknown id
}

TEST_CASE("two renews at the same wall-clock microsecond still order strictly") {
    Registry reg = make_registry();
    ServiceRecord rec = reg.register_service(input("calc"), 600, 1000);

    ServiceRecord after_first, after_second;
    reg.renew(rec.service_id, 600, 1000, &after_first);
    reg.renew(rec.service_id, 600, 1000, &after_second);
    CHECK(rec.stamp < after_first.stamp);
    CHECK(after_first.stamp < after_second.stamp);
}

TEST_CASE("deregister hides the record and is idempotent") {
    Registry reg = make_registry();
    ServiceRecord rec = reg.register_service(input("calc"), 600, 0);

    auto tomb = reg.deregister(rec.service_id, 10);
    REQUIRE(tomb.has_value());
    CHECK(tomb->tombstone);
    CHECK(tomb->methods.empty());
    CHECK(tomb->attributes.empty());
    CHECK(rec.stamp < tomb->stamp);

    QueryFilter f;
    f.name_pattern = "calc";
    CHECK(reg.find(f, 10).empty());

    CHECK_FALSE(reg.deregister(rec.service_id, 20).has_value()); // already tombstoned
    CHECK_FALSE(reg.deregister(test_id(424242), 20).has_value()); // unknown id, no-op
    CHECK(reg.find(QueryFilter{}, 20).empty());
}

TEST_CASE("deregister then re-register the same name/server issues a fresh id") {
    Registry reg = make_registry();
    ServiceRecord first = reg.register_service(input("calc"), 600, 0);
    reg.deregister(first.service_id, 10);
    ServiceRecord second = reg.register_service(input("calc"), 600, 20);

    CHECK(second.service_id != first.service_id);
    // enumerate full registry state: one tombstone, one live record
    auto everything = reg.store().scan();
    REQUIRE(everything.size() == 2);
    for (const auto& r : everything) {
        if (r.service_id == first.service_id)
            CHECK(r.tombstone);
        else
            CHECK((r.service_id == second.service_id && !r.tombstone));
    }
    auto live = reg.find(QueryFilter{}, 20);
    REQUIRE(live.size() == 1);
    CHECK(live[0].service_id == second.service_id);
}

TEST_CASE("find filters by name, prefix, server, and attrs with deterministic order") {
    Registry reg = make_registry();
    CHECK(reg.find(QueryFilter{}, 0).empty());

    auto calc_a = reg.register_service(input("calc", "http://a:1"), 600, 0);
    auto calc_b = reg.register_service(input("calc", "http://b:1"), 600, 0);
    auto stat_a = reg.register_service(input("stat", "http://a:1"), 600, 0);

    QueryFilter by_name;
    by_name.name_pattern = "calc";
    auto found = reg.find(by_name, 1);
    REQUIRE(found.size() == 2);
    CHECK(found[0].service_id == calc_a.service_id); // (name, id) ascending
    CHECK(found[1].service_id == calc_b.service_id);

    QueryFilter prefix;
    prefix.name_pattern = "ca*";
    CHECK(reg.find(prefix, 1).size() == 2);
    prefix.name_pattern = "st*";
    auto stats = reg.find(prefix, 1);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].service_id == stat_a.service_id);
}

TEST_CASE("find_key matches key presence and exact value") {
    Registry reg = make_registry();
    auto rec = reg.register_service(input("calc", "http://a:1", {"add"}, {{"version", "1.0"}}), 600, 0);

    auto by_key = reg.find_key("version", std::nullopt, 1);
    REQUIRE(by_key.size() == 1);
    CHECK(by_key[0].service_id == rec.service_id);
    CHECK(reg.find_key("version", std::string("2.0"), 1).empty());
    CHECK(reg.find_key("missing", std::nullopt, 1).empty());
    CHECK_THROWS_AS(reg.find_key("", std::nullopt, 1), InvalidKey);
}

TEST_CASE("find_key returns exactly the tagged subset of 100 records") {
    Registry reg = make_registry();
    std::set<Id128> tagged; // independent bookkeeping
    for (int i = 0; i < 100; ++i) {
        std::vector<std::pair<std::string, std::string>> attrs;
        if (i % 5 < 2) attrs.emplace_back("tier", "gold"); // 40 of 100
        auto rec = reg.register_service(input("svc-" + std::to_string(i), "http://a:1", {}, attrs),
                                        600, 0);
        if (!attrs.empty()) tagged.insert(rec.service_id);
    }
    REQUIRE(tagged.size() == 40);
    auto found = reg.find_key("tier", std::nullopt, 1);
    CHECK(found.size() == 40);
    for (const auto& r : found) CHECK(tagged.count(r.service_id) == 1);
}

TEST_CASE("find_server returns all live records at that URL") {
    Registry reg = make_registry();
    auto calc_a = reg.register_service(input("calc", "http://a:1"), 600, 0);
    auto stat_a = reg.register_service(input("stat", "http://a:1"), 600, 0);
    reg.register_service(input("calc", "http://b:1"), 600, 0);

    auto at_a = reg.find_server("http://a:1", 1);
    REQUIRE(at_a.size() == 2);
    CHECK(at_a[0].service_id == calc_a.service_id);
    CHECK(at_a[1].service_id == stat_a.service_id);
    CHECK(reg.find_server("http://nowhere:1", 1).empty());
    CHECK_THROWS_AS(reg.find_server("", 1), InvalidServerUrl);
}

TEST_CASE("find_server is equivalent to find with a server filter, randomized") {
    testsup::Rng rng(1234);
    Registry reg = make_registry();
    std::vector<std::string> servers = {"http://a:1", "http://b:1", "http://c:1"};
    for (int i = 0; i < 120; ++i)
        reg.register_service(
            input("svc-" + std::to_string(static_cast<int>(rng.range(0, 30))),
                  servers[static_cast<std::size_t>(rng.range(0, 2))]),
            static_cast<std::int64_t>(rng.range(1, 100)), rng.range(0, 50) * kMicrosPerSec);

    for (const auto& server : servers) {
        for (Micros now : {Micros(0), Micros(40) * kMicrosPerSec, Micros(200) * kMicrosPerSec}) {
            QueryFilter f;
            f.server_url = server;
            CHECK(reg.find_server(server, now) == reg.find(f, now));
        }
    }
}

TEST_CASE("sweep converts expired leases to tombstones and counts them") {
    Registry reg = make_registry();
    CHECK(reg.sweep_expired(1000) == 0);

    auto rec = reg.register_service(input("calc"), 1, 0);
    CHECK(reg.sweep_expired(kMicrosPerSec - 1) == 0); // not expired yet (expires_at > now)

    std::vector<ServiceRecord> tombs;
    CHECK(reg.sweep_expired(2 * kMicrosPerSec, &tombs) == 1);
    REQUIRE(tombs.size() == 1);
    CHECK(tombs[0].service_id == rec.service_id);
    CHECK(tombs[0].tombstone);
    CHECK(rec.stamp < tombs[0].stamp);
    CHECK(reg.find(QueryFilter{}, 2 * kMicrosPerSec).empty());
    CHECK(reg.sweep_expired(3 * kMicrosPerSec) == 0); // already tombstoned
}

TEST_CASE("sweep count matches a brute-force expiry oracle over random leases") {
    testsup::Rng rng(77);
    Registry reg = make_registry();
    std::vector<Lease> leases; // shadow copy
    for (int i = 0; i < 50; ++i) {
        auto rec = reg.register_service(input("svc-" + std::to_string(i)),
                                        static_cast<std::int64_t>(rng.range(1, 120)), 0);
        leases.push_back(rec.lease);
    }
    const Micros t = 60 * kMicrosPerSec;
    std::size_t expected = 0;
    for (const auto& l : leases)
        if (l.expires_at <= t) ++expected;

    CHECK(reg.sweep_expired(t) == expected);
    CHECK(reg.find(QueryFilter{}, t).size() == 50 - expected);
}

TEST_CASE("tombstones are purged only after the tombstone window") {
    Registry reg = make_registry(/*tombstone_window_secs=*/5);
    auto rec = reg.register_service(input("calc"), 600, 0);
    auto tomb = reg.deregister(rec.service_id, 10 * kMicrosPerSec);
    REQUIRE(tomb.has_value());

    const Micros t_inside = tomb->stamp.wall_micros + 4 * kMicrosPerSec;
    reg.sweep_expired(t_inside);
    CHECK(reg.store().get(rec.service_id).has_value()); // still inside the window

    const Micros t_after = tomb->stamp.wall_micros + 5 * kMicrosPerSec;
    reg.sweep_expired(t_after);
    CHECK_FALSE(reg.store().get(rec.service_id).has_value());
}

TEST_CASE("liveness filter: no result ever contains tombstoned or expired records") {
    testsup::Rng rng(99);
    Registry reg = make_registry();
    std::vector<Id128> ids;
    for (int i = 0; i < 60; ++i)
        ids.push_back(reg.register_service(input("svc-" + std::to_string(i % 7)),
                                           static_cast<std::int64_t>(rng.range(1, 90)), 0)
                          .service_id);
    for (int i = 0; i < 20; ++i)
        reg.deregister(ids[static_cast<std::size_t>(rng.range(0, 59))], 5 * kMicrosPerSec);

    for (Micros now : {Micros(0), Micros(30) * kMicrosPerSec, Micros(100) * kMicrosPerSec}) {
        for (const auto& r : reg.find(QueryFilter{}, now)) {
            CHECK_FALSE(r.tombstone);
            CHECK(r.lease.expires_at > now);
        }
    }
}

TEST_CASE("per-id stamp sequences are strictly increasing across mixed mutations") {
    Registry reg = make_registry();
    auto rec = reg.register_service(input("calc"), 600, 1000);
    VersionStamp last = rec.stamp;
    for (int i = 0; i < 20; ++i) {
        ServiceRecord updated;
        reg.renew(rec.service_id, 600, 1000, &updated); // same wall clock every time
        CHECK(last < updated.stamp);
        last = updated.stamp;
    }
    auto tomb = reg.deregister(rec.service_id, 1000);
    REQUIRE(tomb.has_value());
    CHECK(last < tomb->stamp);
}

TEST_CASE("memory capacity limit rejects new ids but keeps serving") {
    Registry reg = make_registry(3600, std::size_t(3));
    for (int i = 0; i < 3; ++i) reg.register_service(input("svc-" + std::to_string(i)), 600, 0);
    CHECK_THROWS_AS(reg.register_service(input("svc-3"), 600, 0), CapacityExceeded);
    CHECK(reg.find(QueryFilter{}, 1).size() == 3);
}

TEST_CASE("identical op sequences produce byte-identical results on both backends") {
    auto run = [](std::shared_ptr<Store> store) {
        RegistryOptions opts;
        opts.id_gen = counter_ids();
        Registry reg(std::move(store), test_id(0xBEEF), opts);
        testsup::Rng rng(2024);
        std::vector<Id128> ids;
        for (int step = 0; step < 400; ++step) {
            Micros now = step * 250'000;
            double roll = rng.chance(0.55) ? 0.0 : (rng.chance(0.6) ? 0.5 : 1.0);
            if (roll == 0.0 || ids.empty()) {
                std::vector<std::pair<std::string, std::string>> attrs{
                    {"tier", rng.chance(0.5) ? "gold" : "silver"}};
                ids.push_back(reg.register_service(
                                     input("svc-" + std::to_string(rng.range(0, 9)),
                                           "http://h" + std::to_string(rng.range(0, 2)) + ":1",
                                           {"m1"}, attrs),
                                     static_cast<std::int64_t>(rng.range(1, 400)), now)
                                  .service_id);
            } else if (roll == 0.5) {
                try {
                    reg.renew(ids[static_cast<std::size_t>(rng.range(0, ids.size() - 1))],
                              static_cast<std::int64_t>(rng.range(1, 400)), now);
                } catch (const NotFound&) {
                }
            } else {
                reg.deregister(ids[static_cast<std::size_t>(rng.range(0, ids.size() - 1))], now);
            }
            if (step % 97 == 0) reg.sweep_expired(now);
        }
        return testsup::canonical_bytes(reg.find(QueryFilter{}, 60 * kMicrosPerSec));
    };

    auto mem1 = run(open_store(BackendDescriptor::memory()));
    auto mem2 = run(open_store(BackendDescriptor::memory()));
    CHECK(mem1 == mem2);

    auto dir = std::filesystem::temp_directory_path() / "griddisc-detreg";
    std::filesystem::remove_all(dir);
    auto persistent = run(open_store(BackendDescriptor::persistent(dir)));
    CHECK(mem1 == persistent);
    std::filesystem::remove_all(dir);
}
