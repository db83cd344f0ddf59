#include "weakch/model_io.hpp"

#include <fstream>

#include "weakch/errors.hpp"

namespace weakch {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw BadModelFile(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::vector<double> number_list(const nlohmann::json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_array()) throw BadModelFile(std::string("\"") + key + "\" must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) throw BadModelFile(std::string("\"") + key + "\" must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::string> label_list(const nlohmann::json& v, const std::string& what) {
    if (!v.is_array()) throw BadModelFile(what + " must be an array of atom labels");
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw BadModelFile(what + " must be an array of atom labels");
        out.push_back(x.get<std::string>());
    }
    return out;
}

void expect_kind(const nlohmann::json& j, const std::string& kind) {
    const auto& k = field(j, "kind");
    if (!k.is_string() || k.get<std::string>() != kind) throw BadModelFile("expected \"kind\": \"" + kind + "\"");
}

}  // namespace

EprbModel eprb_model_from_json(const nlohmann::json& j) {
    expect_kind(j, "eprb");
    const auto& c = field(j, "cards");
    if (!c.is_array() || c.size() != 4) throw BadModelFile("\"cards\" must list four cardinalities");
    CauseCards cards{};
    for (std::size_t d = 0; d < 4; ++d) {
        if (!c[d].is_number_integer() || c[d].get<long long>() < 1) {
            throw BadModelFile("cardinalities must be positive integers");
        }
        cards[d] = c[d].get<std::size_t>();
    }
    const auto w = number_list(j, "weights");
    try {
        return EprbModel(cards, w);
    } catch (const std::invalid_argument& e) {
        throw BadModelFile(e.what());
    } catch (const Error& e) {
        throw BadModelFile(e.what());
    }
}

PairwiseCcModel pairwise_model_from_json(const nlohmann::json& j) {
    expect_kind(j, "pairwise");
    try {
        if (j.contains("cells")) {
            const auto& c = j.at("cells");
            if (!c.is_number_integer() || c.get<long long>() < 1) throw BadModelFile("\"cells\" must be a positive integer");
            const auto n_cells = c.get<std::size_t>();
            const auto w = number_list(j, "weights");
            if (w.size() != 4 * n_cells) throw BadModelFile("expected four weights per cell");
            const std::size_t n = w.size();
            FiniteProbSpace space = make_space(w);
            Event a = Event::none(n), b = Event::none(n);
            std::vector<Event> cells;
            for (std::size_t base = 0; base < n; base += 4) {
                a.insert(base);
                a.insert(base + 1);
                b.insert(base);
                b.insert(base + 2);
                const std::size_t members[] = {base, base + 1, base + 2, base + 3};
                cells.emplace_back(n, members);
            }
            return PairwiseCcModel(std::move(space), std::move(a), std::move(b), Partition(n, std::move(cells)));
        }

        const auto atoms = label_list(field(j, "atoms"), "\"atoms\"");
        const auto w = number_list(j, "weights");
        if (atoms.size() != w.size()) throw BadModelFile("\"atoms\" and \"weights\" differ in length");
        FiniteProbSpace space = make_space(atoms, w);
        const Event a = space.event(label_list(field(j, "A"), "\"A\""));
        const Event b = space.event(label_list(field(j, "B"), "\"B\""));
        const auto& c = field(j, "C");
        if (!c.is_array()) throw BadModelFile("\"C\" must be an array of cells");
        std::vector<Event> cells;
        for (const auto& cell : c) cells.push_back(space.event(label_list(cell, "a cell of \"C\"")));
        const std::size_t n = space.size();
        return PairwiseCcModel(std::move(space), a, b, Partition(n, std::move(cells)));
    } catch (const BadModelFile&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw BadModelFile(e.what());
    } catch (const Error& e) {
        throw BadModelFile(e.what());
    }
}

nlohmann::json to_json(const EprbModel& m) {
    const auto& c = m.cards();
    return {{"kind", "eprb"},
            {"cards", {c[0], c[1], c[2], c[3]}},
            {"weights", std::vector<double>(m.weights().begin(), m.weights().end())}};
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadModelFile("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw BadModelFile(path + ": " + e.what());
    }
}

EprbModel load_eprb_model(const std::string& path) { return eprb_model_from_json(read_json_file(path)); }

}  // namespace weakch
