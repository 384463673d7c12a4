#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mpcert/wcet.hpp"

namespace mpcert {

namespace {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("cost model: 64-bit overflow");
    return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("cost model: 64-bit overflow");
    return r;
}

std::uint64_t power(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r = mul(r, b);
    return r;
}

CostModel from_json(const nlohmann::json &j) {
    CostModel cm;
    if (!j.is_object()) throw InvalidInput("cost profile: expected a JSON object");
    cm.name = j.value("name", std::string("custom"));
    if (j.contains("overhead")) {
        if (!j["overhead"].is_number_unsigned()) throw InvalidInput("cost profile: overhead must be a nonnegative integer");
        cm.overhead = j["overhead"].get<std::uint64_t>();
    }
    if (!j.contains("blocks") || !j["blocks"].is_object()) throw InvalidInput("cost profile: missing blocks object");
    for (const auto &[key, terms] : j["blocks"].items()) {
        const auto b = block_from_name(key);
        if (!b) throw InvalidInput("cost profile: unknown block " + key);
        if (!terms.is_array()) throw InvalidInput("cost profile: block " + key + " must map to an array");
        std::vector<CountTerm> v;
        for (const auto &t : terms) {
            CountTerm c;
            if (!t.contains("coeff") || !t["coeff"].is_number_unsigned())
                throw InvalidInput("cost profile: coeff must be a nonnegative integer");
            c.coeff = t["coeff"].get<std::uint64_t>();
            auto expo = [&](const char *name) {
                if (!t.contains(name)) return 0;
                if (!t[name].is_number_unsigned() || t[name].get<int>() > 8)
                    throw InvalidInput(std::string("cost profile: exponent ") + name + " must be an integer in [0, 8]");
                return t[name].get<int>();
            };
            c.s_exp = expo("s");
            c.r_exp = expo("r");
            c.n_exp = expo("n");
            c.m_exp = expo("m");
            v.push_back(c);
        }
        cm.blocks[static_cast<std::size_t>(*b)] = std::move(v);
    }
    return cm;
}

}  // namespace

CostModel CostModel::unit() {
    CostModel cm;
    cm.name = "unit";
    for (auto &b : cm.blocks) b = std::vector<CountTerm>{{1, 0, 0, 0, 0}};
    return cm;
}

CostModel CostModel::flop() {
    CostModel cm;
    cm.name = "flop";
    for (int i = 0; i < kBlockCount; ++i) {
        const auto b = static_cast<Block>(i);
        std::vector<CountTerm> v;
        for (const auto &t : block_flop_terms(b)) v.push_back(t);
        for (const auto &t : block_mem_terms(b)) v.push_back(t);
        cm.blocks[i] = std::move(v);
    }
    return cm;
}

CostModel CostModel::resolve(const std::string &name_or_path) {
    if (name_or_path == "unit") return unit();
    if (name_or_path == "flop") return flop();
    std::ifstream in(name_or_path);
    if (!in) throw InvalidInput("cost profile: cannot open " + name_or_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidInput(std::string("cost profile: ") + e.what());
    }
    return from_json(j);
}

std::uint64_t CostModel::event_cost(const TraceEvent &e, int n, int m) const {
    const auto &entry = blocks[static_cast<std::size_t>(e.block)];
    if (!entry) throw InvalidInput("cost model " + name + " has no entry for block " + std::string(block_name(e.block)));
    if (e.size < 0 || e.size > m) throw InvalidInput("cost model: event size out of range");
    const auto s = static_cast<std::uint64_t>(e.size), r = static_cast<std::uint64_t>(m - e.size),
               un = static_cast<std::uint64_t>(n), um = static_cast<std::uint64_t>(m);
    std::uint64_t total = 0;
    for (const auto &t : *entry) {
        std::uint64_t v = t.coeff;
        v = mul(v, power(s, t.s_exp));
        v = mul(v, power(r, t.r_exp));
        v = mul(v, power(un, t.n_exp));
        v = mul(v, power(um, t.m_exp));
        total = add(total, v);
    }
    return total;
}

CostModel CostModel::scaled(std::uint64_t k) const {
    CostModel cm = *this;
    cm.overhead = mul(overhead, k);
    for (auto &b : cm.blocks)
        if (b)
            for (auto &t : *b) t.coeff = mul(t.coeff, k);
    return cm;
}

std::uint64_t trace_cost(const ExecutionTrace &t, const CostModel &cm) {
    std::uint64_t total = cm.overhead;
    for (const auto &e : t.events) total = add(total, cm.event_cost(e, t.n, t.m));
    return total;
}

}  // namespace mpcert
