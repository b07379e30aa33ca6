#include "fixtures.hpp"

#include "fedlibre/util/xml.hpp"

#include <atomic>
#include <unistd.h>

namespace fixtures {

using fedlibre::xml::escape_text;

std::string dc_xml(const std::vector<std::pair<std::string, std::string>>& elements)
{
    std::string out = "<oai_dc:dc xmlns:oai_dc=\"http://www.openarchives.org/OAI/2.0/oai_dc/\" "
                      "xmlns:dc=\"http://purl.org/dc/elements/1.1/\">";
    for (const auto& [name, value] : elements)
        out += "<dc:" + name + ">" + escape_text(value) + "</dc:" + name + ">";
    out += "</oai_dc:dc>";
    return out;
}

namespace {

std::string lang_string(const std::string& value, const std::string& lang)
{
    return "<string language=\"" + lang + "\">" + escape_text(value) + "</string>";
}

} // namespace

std::string lom_xml(const LomSpec& s)
{
    std::string out = "<lom xmlns=\"http://ltsc.ieee.org/xsd/LOM\">";
    out += "<general>";
    if (!s.identifier.empty())
        out += "<identifier><catalog>URI</catalog><entry>" + escape_text(s.identifier) + "</entry></identifier>";
    if (!s.title.empty())
        out += "<title>" + lang_string(s.title, s.title_lang) + "</title>";
    out += "<language>fr</language>";
    if (!s.description.empty())
        out += "<description>" + lang_string(s.description, "fr") + "</description>";
    for (const auto& k : s.keywords)
        out += "<keyword>" + lang_string(k, "fr") + "</keyword>";
    out += "</general>";
    if (!s.contributors.empty()) {
        out += "<lifeCycle>";
        for (const auto& [role, name] : s.contributors) {
            out += "<contribute><role><source>LOMv1.0</source><value>" + role + "</value></role><entity>"
                   "BEGIN:VCARD\nVERSION:3.0\nFN:" + escape_text(name) + "\nEND:VCARD</entity>"
                   "<date><dateTime>2014-05-01</dateTime></date></contribute>";
        }
        out += "</lifeCycle>";
    }
    out += "<metaMetadata><metadataSchema>LOMv1.0</metadataSchema><metadataSchema>LOMFRv1.0</metadataSchema>"
           "</metaMetadata>";
    out += "<technical>";
    if (!s.format.empty())
        out += "<format>" + escape_text(s.format) + "</format>";
    if (!s.location.empty())
        out += "<location>" + escape_text(s.location) + "</location>";
    out += "</technical>";
    out += "<educational>";
    if (!s.resource_type.empty())
        out += "<learningResourceType><source>LOMFRv1.0</source><value>" + escape_text(s.resource_type) +
               "</value></learningResourceType>";
    if (!s.context.empty())
        out += "<context><source>LOMFRv1.0</source><value>" + escape_text(s.context) + "</value></context>";
    if (!s.learning_time.empty())
        out += "<typicalLearningTime><duration>" + s.learning_time + "</duration></typicalLearningTime>";
    out += "</educational>";
    if (!s.taxon.empty()) {
        out += "<classification><purpose><source>LOMv1.0</source><value>discipline</value></purpose>"
               "<taxonPath><source>" + lang_string("CDD", "fr") + "</source><taxon><id>1</id><entry>" +
               lang_string(s.taxon, "fr") + "</entry></taxon></taxonPath></classification>";
    }
    out += "</lom>";
    return out;
}

namespace {

const std::vector<std::string> kWords{"analyse",  "numérique", "algèbre",   "optique",   "chimie",
                                      "économie", "droit",     "biologie",  "histoire",  "physique",
                                      "réseaux",  "données",   "statistique", "mécanique", "gestion"};
const std::vector<std::string> kFormats{"video/mp4", "text/html", "application/pdf", "audio/mpeg", "image/png"};
const std::vector<std::string> kTypes{"exercice", "cours", "simulation", "tutoriel", "étude de cas"};
const std::vector<std::string> kSubjects{"mathématiques", "physique", "droit", "économie", "informatique"};

const std::string& pick(const std::vector<std::string>& v, int i)
{
    return v[static_cast<std::size_t>(i) % v.size()];
}

} // namespace

std::string synthetic_dc(int i)
{
    return dc_xml({
        {"title", "Ressource " + std::to_string(i) + " : " + pick(kWords, i) + " " + pick(kWords, i * 7 + 3)},
        {"creator", "Auteur " + std::to_string(i % 11)},
        {"subject", pick(kSubjects, i)},
        {"description", "Description de la ressource " + std::to_string(i) + " en " + pick(kWords, i * 3 + 1)},
        {"date", std::to_string(2005 + i % 12)},
        {"type", pick(kTypes, i)},
        {"format", pick(kFormats, i)},
        {"identifier", "http://example.org/res/" + std::to_string(i)},
        {"language", i % 3 == 0 ? "en" : "fr"},
        {"rights", "CC BY-NC-SA"},
    });
}

std::string synthetic_lom(int i)
{
    LomSpec s;
    s.title = "Module " + std::to_string(i) + " de " + pick(kWords, i * 5 + 2);
    s.description = "Cours en ligne sur " + pick(kWords, i) + " et " + pick(kWords, i + 4);
    s.keywords = {pick(kWords, i + 1), pick(kSubjects, i)};
    s.identifier = "http://example.org/lom/" + std::to_string(i);
    s.format = pick(kFormats, i + 1);
    s.location = "http://example.org/lom/" + std::to_string(i) + "/content";
    s.resource_type = pick(kTypes, i + 2);
    s.context = i % 2 ? "enseignement supérieur" : "formation continue";
    s.learning_time = "PT" + std::to_string(1 + i % 3) + "H";
    s.contributors = {{"author", "Prof " + std::to_string(i % 5)}, {"editor", "UNT"}};
    s.taxon = pick(kSubjects, i + 1);
    return lom_xml(s);
}

fedlibre::RecordEnvelope envelope(const std::string& source, const std::string& id, fedlibre::Timestamp datestamp,
                                  const std::string& dc_title)
{
    fedlibre::RecordEnvelope e;
    e.source_id = source;
    e.oai_identifier = id;
    e.datestamp = datestamp;
    e.payload = fedlibre::metadata::MetadataPayload::parse(fedlibre::metadata::SchemaTag::OaiDc,
                                                           dc_xml({{"title", dc_title}}));
    return e;
}

fedlibre::RecordEnvelope deleted_envelope(const std::string& source, const std::string& id,
                                          fedlibre::Timestamp datestamp)
{
    fedlibre::RecordEnvelope e;
    e.source_id = source;
    e.oai_identifier = id;
    e.datestamp = datestamp;
    e.deleted = true;
    return e;
}

fedlibre::metadata::LomRecord random_lom(std::mt19937& rng)
{
    using namespace fedlibre::metadata;
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_int_distribution<int> word(0, static_cast<int>(kWords.size()) - 1);
    const auto ls = [&] { return LangString{kWords[static_cast<std::size_t>(word(rng))], count(rng) % 2 ? "fr" : "en"}; };
    LomRecord r;
    for (int n = count(rng); n > 0; --n)
        r.general.title.push_back(ls());
    if (count(rng) == 0 && !r.general.title.empty())
        r.general.title.push_back(r.general.title.front()); // duplicate titles must survive too
    for (int n = count(rng); n > 0; --n)
        r.general.description.push_back(ls());
    for (int n = count(rng); n > 0; --n)
        r.general.keyword.push_back(ls());
    for (int n = count(rng); n > 0; --n)
        r.general.identifier.push_back({"URI", "http://example.org/" + std::to_string(word(rng))});
    for (int n = count(rng); n > 0; --n)
        r.life_cycle.contribute.push_back({count(rng) % 2 ? "author" : "editor", "Person " + std::to_string(n), ""});
    for (int n = count(rng); n > 0; --n)
        r.technical.format.push_back(kFormats[static_cast<std::size_t>(n) % kFormats.size()]);
    if (count(rng) > 1)
        r.educational.typical_learning_time_seconds = 60 * word(rng);
    for (int n = count(rng); n > 0; --n)
        r.educational.resource_type.push_back(kTypes[static_cast<std::size_t>(n) % kTypes.size()]);
    return r;
}

TempDir::TempDir()
{
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fedlibre-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::vector<fedlibre::RecordEnvelope> federation_corpus(const std::string& source, fedlibre::Timestamp base)
{
    using fedlibre::metadata::MetadataPayload;
    using fedlibre::metadata::SchemaTag;
    std::vector<fedlibre::RecordEnvelope> out;
    for (int i = 0; i < 100; ++i) {
        fedlibre::RecordEnvelope e;
        e.source_id = source;
        e.oai_identifier = "oai:fed:" + std::to_string(i);
        e.datestamp = base + std::chrono::minutes(i);
        e.set_specs = {source};
        if (i % 20 == 7)
            e.deleted = true;
        else if (i < 60)
            e.payload = MetadataPayload::parse(SchemaTag::OaiDc, synthetic_dc(i));
        else
            e.payload = MetadataPayload::parse(SchemaTag::Lom, synthetic_lom(i));
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace fixtures
