#include <doctest.h>

#include "fedlibre/store/checkpoint.hpp"
#include "fedlibre/store/record_store.hpp"
#include "fedlibre/store/source.hpp"
#include "fedlibre/util/error.hpp"

#include "support/fixtures.hpp"

#include <fstream>

using namespace fedlibre;
using namespace fedlibre::store;

namespace {

std::string dump(const RecordStore& s)
{
    std::string out;
    for (const auto& r : s.list_all())
        out += serialize_record(*r) + "\n";
    return out;
}

SourceDescriptor descriptor(const std::string& id)
{
    SourceDescriptor d;
    d.source_id = id;
    d.name = "Source " + id;
    d.base_url = "http://example.org/" + id + "/oai";
    d.steward = "Steward";
    d.audience = {"students"};
    d.languages = {"fr"};
    d.declared_resource_count = 100;
    return d;
}

} // namespace

TEST_CASE("upsert outcomes follow datestamps")
{
    fixtures::TempDir dir;
    FixedClock clock(make_utc(2016, 1, 1));
    RecordStore s(dir.path(), {.clock = &clock});
    const auto t0 = make_utc(2015, 1, 1);

    CHECK(s.upsert(fixtures::envelope("a", "oai:1", t0, "one")) == UpsertOutcome::Added);
    CHECK(s.upsert(fixtures::envelope("a", "oai:1", t0, "one")) == UpsertOutcome::Unchanged);
    CHECK(s.upsert(fixtures::envelope("a", "oai:1", t0 - std::chrono::days(1), "old")) == UpsertOutcome::Unchanged);
    CHECK(s.upsert(fixtures::envelope("a", "oai:1", t0 + std::chrono::days(1), "two")) == UpsertOutcome::Updated);
    CHECK(s.get(RecordKey("a", "oai:1"))->envelope.payload->dc_view().values(metadata::DcElement::Title) ==
          std::vector<std::string>{"two"});
    CHECK(s.get(RecordKey("a", "oai:1"))->lifecycle == Lifecycle::Published);

    CHECK(s.upsert(fixtures::deleted_envelope("a", "oai:1", t0 + std::chrono::days(2))) ==
          UpsertOutcome::MarkedDeleted);
    const auto gone = s.get(RecordKey("a", "oai:1"));
    CHECK(gone->lifecycle == Lifecycle::Withdrawn);
    CHECK_FALSE(gone->searchable());
    CHECK(gone->exposed());

    CHECK(s.upsert(fixtures::envelope("a", "oai:1", t0 + std::chrono::days(3), "back")) == UpsertOutcome::Updated);
    CHECK(s.get(RecordKey("a", "oai:1"))->lifecycle == Lifecycle::Published);

    try {
        s.get(RecordKey("a", "missing"));
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotFound);
    }
}

TEST_CASE("moderated stores require publish")
{
    fixtures::TempDir dir;
    RecordStore s(dir.path(), {.auto_publish = false});
    s.upsert(fixtures::envelope("a", "x", make_utc(2015, 1, 1), "t"));
    const RecordKey k("a", "x");
    CHECK(s.get(k)->lifecycle == Lifecycle::Harvested);
    s.publish(k);
    CHECK(s.get(k)->lifecycle == Lifecycle::Published);
    CHECK_THROWS_AS(s.publish(RecordKey("a", "y")), Error);
}

TEST_CASE("list_all orders by datestamp then key and filters")
{
    fixtures::TempDir dir;
    RecordStore s(dir.path());
    const auto t = make_utc(2015, 1, 1);
    s.upsert(fixtures::envelope("b", "2", t, "x"));
    s.upsert(fixtures::envelope("a", "9", t, "x"));
    s.upsert(fixtures::envelope("a", "1", t + std::chrono::hours(1), "x"));
    s.upsert(fixtures::deleted_envelope("c", "1", t - std::chrono::hours(1)));
    const auto all = s.list_all();
    REQUIRE(all.size() == 4);
    CHECK(all[0]->key.str() == "c:1");
    CHECK(all[1]->key.str() == "a:9");
    CHECK(all[2]->key.str() == "b:2");
    CHECK(all[3]->key.str() == "a:1");
    CHECK(s.list_all({.source_id = "a"}).size() == 2);
    CHECK(s.list_all({.lifecycle = Lifecycle::Withdrawn}).size() == 1);
    CHECK(s.list_all({.since_datestamp = t}).size() == 3);
}

TEST_CASE("store survives reopen, torn tail and compaction")
{
    fixtures::TempDir dir;
    std::string before;
    {
        RecordStore s(dir.path());
        for (int i = 0; i < 30; ++i)
            s.upsert(fixtures::envelope("src", "id" + std::to_string(i), make_utc(2015, 1, 1 + i % 28), "t"));
        s.upsert(fixtures::envelope("src", "id3", make_utc(2016, 1, 1), "newer"));
        s.sync();
        before = dump(s);
    }
    {
        std::ofstream(dir.path() / "records.log", std::ios::app) << "{\"key\":\"src:torn\",\"sour";
    }
    {
        RecordStore s(dir.path());
        CHECK(s.size() == 30);
        CHECK(dump(s) == before);
        s.compact();
        CHECK(dump(s) == before);
    }
    RecordStore s(dir.path());
    CHECK(dump(s) == before);
}

TEST_CASE("record serialization round trips")
{
    fixtures::TempDir dir;
    RecordStore s(dir.path());
    metadata::MetadataPayload lom = metadata::MetadataPayload::parse(metadata::SchemaTag::Lom, fixtures::synthetic_lom(2));
    RecordEnvelope e;
    e.source_id = "s";
    e.oai_identifier = "oai:s:2";
    e.datestamp = make_utc(2014, 3, 4, 5, 6, 7);
    e.set_specs = {"maths"};
    e.payload = lom;
    s.upsert(e);
    const auto r = s.get(e.key());
    const auto line = serialize_record(*r);
    const auto back = deserialize_record(line);
    CHECK(back.envelope == r->envelope);
    CHECK(back.facets == r->facets);
    CHECK(serialize_record(back) == line);
    CHECK_THROWS_AS(deserialize_record("{not json"), Error);
}

TEST_CASE("source registry")
{
    fixtures::TempDir dir;
    SourceRegistry reg(dir.path());
    reg.add(descriptor("unisciel"));
    reg.add(descriptor("uved"));
    try {
        reg.add(descriptor("uved"));
        FAIL("expected DuplicateSource");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DuplicateSource);
    }
    CHECK(reg.list().size() == 2);
    reg.set_enabled("uved", false);
    SourceRegistry reopened(dir.path());
    CHECK_FALSE(reopened.get("uved").enabled);
    CHECK(reopened.get("unisciel") == descriptor("unisciel"));
    CHECK_THROWS_AS(reopened.get("nope"), Error);

    auto bad = descriptor("Bad Slug");
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = descriptor("ok");
    bad.base_url = "ftp://x";
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = descriptor("ok");
    bad.audience = {"aliens"};
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK(parse_nature("associative") == Nature::Associative);
    CHECK(parse_access_mode("free-registration") == AccessMode::FreeRegistration);
}

TEST_CASE("checkpoints never move backwards")
{
    fixtures::TempDir dir;
    CheckpointStore cps(dir.path());
    CHECK_FALSE(cps.get("a"));
    cps.put({"a", make_utc(2016, 1, 2), 10, RunStatus::Ok});
    cps.put({"a", make_utc(2016, 1, 1), 12, RunStatus::Partial});
    CheckpointStore reopened(dir.path());
    const auto cp = reopened.get("a");
    REQUIRE(cp);
    CHECK(cp->last_successful_until == make_utc(2016, 1, 2));
    CHECK(cp->records_seen == 12);
    CHECK(cp->last_run_status == RunStatus::Partial);
}
