#include "griddisc/record.hpp"

#include "griddisc/errors.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace griddisc;

TEST_CASE("lease arithmetic is exact microseconds") {
    Lease l = make_lease(1'000'000, 300);
    CHECK(l.granted_at == 1'000'000);
    CHECK(l.duration_secs == 300);
    CHECK(l.expires_at == 1'000'000 + 300 * kMicrosPerSec);
}

TEST_CASE("lease duration bounds") {
    CHECK_THROWS_AS(make_lease(0, 0), LeaseOutOfRange);
    CHECK_THROWS_AS(make_lease(0, -5), LeaseOutOfRange);
    CHECK_THROWS_AS(make_lease(0, kMaxLeaseSecs + 1), LeaseOutOfRange);
    CHECK(make_lease(0, 1).expires_at == kMicrosPerSec);
    CHECK(make_lease(0, kMaxLeaseSecs).duration_secs == kMaxLeaseSecs);
}

TEST_CASE("stamps order by (wall_micros, origin bytes)") {
    Id128 low = testsup::test_id(1), high = testsup::test_id(2);
    CHECK(VersionStamp{5, high} < VersionStamp{6, low});
    CHECK(VersionStamp{5, low} < VersionStamp{5, high});
    CHECK_FALSE(VersionStamp{5, low} < VersionStamp{5, low});
}

TEST_CASE("next_stamp is strictly monotone under clock ties and regression") {
    Id128 me = testsup::test_id(7);
    VersionStamp s1 = next_stamp(100, me, std::nullopt);
    CHECK(s1.wall_micros == 100);

    // same microsecond: bumped past the current stamp
    VersionStamp s2 = next_stamp(100, me, s1);
    CHECK(s1 < s2);
    CHECK(s2.wall_micros == 101);

    // clock stepped backwards: still monotone
    VersionStamp s3 = next_stamp(50, me, s2);
    CHECK(s2 < s3);

    // tie against a *larger-origin* stamp from another node
    VersionStamp other{100, testsup::test_id(0xffff)};
    VersionStamp s4 = next_stamp(100, me, other);
    CHECK(other < s4);
}

TEST_CASE("name pattern: exact, or prefix with trailing star") {
    CHECK(name_matches("calc", "calc"));
    CHECK_FALSE(name_matches("calc", "calcx"));
    CHECK(name_matches("ca*", "calc"));
    CHECK_FALSE(name_matches("ca*", "stat"));
    CHECK(name_matches("*", "anything"));
    CHECK(name_matches("calc*", "calc"));
    // '*' is only special at the end
    CHECK_FALSE(name_matches("c*c", "calc"));
    CHECK(name_matches("c*c", "c*c"));
}

TEST_CASE("empty filter matches every record; attrs match key and value") {
    ServiceRecord r;
    r.name = "calc";
    r.server_url = "http://a:1";
    r.attributes = {{"version", "1.0"}};
    CHECK(QueryFilter{}.matches(r));

    QueryFilter by_key;
    by_key.required_attrs = {{"version", std::nullopt}};
    CHECK(by_key.matches(r));

    QueryFilter by_value;
    by_value.required_attrs = {{"version", std::string("2.0")}};
    CHECK_FALSE(by_value.matches(r));

    QueryFilter missing;
    missing.required_attrs = {{"tier", std::nullopt}};
    CHECK_FALSE(missing.matches(r));
}

TEST_CASE("filter matching agrees with the brute-force oracle on random records") {
    testsup::Rng rng(41);
    for (int round = 0; round < 200; ++round) {
        std::vector<ServiceRecord> all;
        for (int i = 0; i < 30; ++i) all.push_back(testsup::random_record(rng));

        QueryFilter f;
        if (rng.chance(0.5)) f.name_pattern = rng.chance(0.5) ? all[0].name : all[0].name.substr(0, 2) + "*";
        if (rng.chance(0.3)) f.server_url = all[1].server_url;
        if (rng.chance(0.3) && !all[2].attributes.empty())
            f.required_attrs.emplace_back(all[2].attributes.begin()->first, std::nullopt);

        Micros now = rng.range(0, 4'000'000'000'000'000);
        std::vector<ServiceRecord> got;
        for (const auto& r : all)
            if (record_live(r, now) && f.matches(r)) got.push_back(r);
        sort_results(got);
        CHECK(got == testsup::oracle_query(all, f, now));
    }
}
