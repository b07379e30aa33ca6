#pragma once

#include "fedlibre/harvester/envelope.hpp"
#include "fedlibre/metadata/lom.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

/// oai_dc document with the given (element, value) children in order.
std::string dc_xml(const std::vector<std::pair<std::string, std::string>>& elements);

struct LomSpec {
    std::string title;
    std::string title_lang = "fr";
    std::string description;
    std::vector<std::string> keywords;
    std::string identifier;
    std::string format;
    std::string location;
    std::string resource_type;
    std::string context;
    std::string learning_time;
    std::vector<std::pair<std::string, std::string>> contributors; // role, name
    std::string taxon;
};

/// Hand-written LOM XML (independent of any library serializer).
std::string lom_xml(const LomSpec& spec);

/// Deterministic synthetic records for federation and store tests.
std::string synthetic_dc(int i);
std::string synthetic_lom(int i);

fedlibre::RecordEnvelope envelope(const std::string& source, const std::string& id, fedlibre::Timestamp datestamp,
                                  const std::string& dc_title);
fedlibre::RecordEnvelope deleted_envelope(const std::string& source, const std::string& id,
                                          fedlibre::Timestamp datestamp);

fedlibre::metadata::LomRecord random_lom(std::mt19937& rng);

/// 100 records of one source: ids 0..59 oai_dc, 60..99 LOM, and the five
/// ids with i % 20 == 7 deleted. Datestamps are `base` + i minutes.
std::vector<fedlibre::RecordEnvelope> federation_corpus(const std::string& source, fedlibre::Timestamp base);

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace fixtures
