#include "mbp/market_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mbp {

namespace {

using nlohmann::json;

template <typename T>
std::vector<std::vector<T>> read_lists(const json& node, const char* key) {
    if (!node.is_array()) throw MarketError(std::string("\"") + key + "\" must be an array of arrays");
    std::vector<std::vector<T>> out;
    for (std::size_t k = 0; k < node.size(); ++k) {
        const auto& row = node[k];
        if (!row.is_array()) throw MarketError(std::string("\"") + key + "\" must be an array of arrays");
        std::vector<T> list;
        for (const auto& v : row) {
            if (!v.is_number_integer()) throw MarketError(std::string("\"") + key + "\" entries must be integers");
            const T id = v.get<T>();
            for (T seen : list)
                if (seen == id)
                    throw MarketError(std::string(key) + "[" + std::to_string(k) + "]: duplicate entry " +
                                      std::to_string(id));
            list.push_back(id);
        }
        out.push_back(std::move(list));
    }
    return out;
}

int read_count(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) throw MarketError(std::string("missing integer \"") + key + "\"");
    return doc[key].get<int>();
}

}  // namespace

Market parse_market(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MarketError(std::string("malformed market file: ") + e.what());
    }
    if (!doc.is_object()) throw MarketError("market file must hold a JSON object");

    Market market;
    market.n = read_count(doc, "n");
    market.m = read_count(doc, "m");
    if (!doc.contains("capacities") || !doc["capacities"].is_array()) throw MarketError("missing \"capacities\"");
    for (const auto& q : doc["capacities"]) {
        if (!q.is_number_integer()) throw MarketError("\"capacities\" entries must be integers");
        market.capacities.push_back(q.get<int>());
    }
    if (!doc.contains("preferences")) throw MarketError("missing \"preferences\"");
    market.preferences = read_lists<SchoolId>(doc["preferences"], "preferences");

    const bool has_raw = doc.contains("raw_priorities");
    if (has_raw == doc.contains("priorities"))
        throw MarketError("exactly one of \"priorities\" or \"raw_priorities\" is required");
    if (has_raw) {
        auto raw = read_lists<StudentId>(doc["raw_priorities"], "raw_priorities");
        if (static_cast<int>(raw.size()) != market.m) throw MarketError("raw_priorities length != m");
        for (std::size_t s = 0; s < raw.size(); ++s)
            if (static_cast<int>(raw[s].size()) != market.n)
                throw MarketError("raw_priorities[" + std::to_string(s) + "] must order all students");
        market.priorities = restrict_priorities(raw, market.preferences, market.m);
    } else {
        market.priorities = read_lists<StudentId>(doc["priorities"], "priorities");
    }
    require_valid(market);
    return market;
}

std::string dump_market(const Market& market) {
    json doc;
    doc["n"] = market.n;
    doc["m"] = market.m;
    doc["capacities"] = market.capacities;
    doc["preferences"] = market.preferences;
    doc["priorities"] = market.priorities;
    return doc.dump() + "\n";
}

Market read_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MarketError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_market(buf.str());
}

void write_market(const Market& market, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MarketError("cannot write " + path.string());
    out << dump_market(market);
}

}  // namespace mbp
