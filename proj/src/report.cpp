#include "fracexp/report.hpp"

#include "fracexp/errors.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace fracexp {

Json to_json(const SeriesResult& s) {
    Json j;
    j["order"] = s.order;
    j["terms"] = s.terms;
    j["partial_sums"] = s.partial_sums;
    j["diagnostics"] = s.diagnostics;
    j["diagnostics_label"] = s.diagnostics_label;
    return j;
}

SeriesResult series_from_json(const Json& j) {
    SeriesResult s;
    s.order = j.at("order").get<int>();
    s.terms = j.at("terms").get<std::vector<double>>();
    s.partial_sums = j.at("partial_sums").get<std::vector<double>>();
    s.diagnostics = j.at("diagnostics").get<std::vector<double>>();
    s.diagnostics_label = j.at("diagnostics_label").get<std::string>();
    return s;
}

Json to_json(const MertonResult& m) {
    Json j;
    j["T"] = m.T;
    j["H"] = m.H;
    j["closed_form"] = m.closed_form;
    j["partial_sums"] = m.partial_sums;
    j["engine_partial_sums"] = m.engine_partial_sums;
    j["rel_gap"] = m.rel_gap;
    return j;
}

Json to_json(const CirExpansion& c) {
    Json j;
    j["T"] = c.T;
    j["H"] = c.H;
    j["c0"] = c.c0;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["c2_integrals"] = c.c2_integrals;
    j["approx"] = c.approx;
    return j;
}

Json to_json(const CirMcCheck& c) {
    Json j;
    j["mc"] = c.mc;
    j["std_error"] = c.std_error;
    j["coarse_mc"] = c.coarse_mc;
    j["refinement_shift"] = c.refinement_shift;
    j["series"] = c.series;
    j["band"] = c.band;
    j["truncation_budget"] = c.truncation_budget;
    j["n_paths"] = c.n_paths;
    j["steps"] = c.steps;
    j["within"] = c.within();
    return j;
}

Json to_json(const LognormalSeries& s) {
    std::vector<double> tr, ti, mag, pr, pi;
    for (std::size_t n = 0; n < s.terms.size(); ++n) {
        tr.push_back(s.terms[n].real());
        ti.push_back(s.terms[n].imag());
        mag.push_back(std::abs(s.terms[n]));
        pr.push_back(s.partial_sums[n].real());
        pi.push_back(s.partial_sums[n].imag());
    }
    Json j;
    j["term_re"] = tr;
    j["term_im"] = ti;
    j["magnitude"] = mag;
    j["partial_re"] = pr;
    j["partial_im"] = pi;
    return j;
}

Json to_json(const FbmEnsemble& ens) {
    Json j;
    j["H"] = ens.H.value();
    j["seed"] = ens.seed;
    j["times"] = ens.times;
    Json paths = Json::array();
    for (long p = 0; p < ens.n_paths(); ++p) {
        const auto row = ens.values.row(p);
        paths.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    j["paths"] = std::move(paths);
    return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::string cell(const Json& v) {
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

bool numeric_array(const Json& v) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& x : v)
        if (!x.is_number()) return false;
    return true;
}

struct Block {
    std::vector<std::string> columns;
    std::vector<std::pair<std::string, std::size_t>> rows;  // (item, index) per row
    std::vector<std::vector<std::string>> cells;
};

// groups of equal-length numeric arrays of one object, in key order
std::vector<std::vector<std::string>> array_groups(const Json& obj) {
    std::vector<std::vector<std::string>> groups;
    std::vector<std::size_t> lens;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!numeric_array(it.value())) continue;
        const std::size_t n = it.value().size();
        std::size_t g = 0;
        while (g < lens.size() && lens[g] != n) ++g;
        if (g == lens.size()) {
            lens.push_back(n);
            groups.emplace_back();
        }
        groups[g].push_back(it.key());
    }
    return groups;
}

void render_object(const Json& j, const std::string& path, std::ostringstream& os) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& v = it.value();
        const std::string name = path.empty() ? it.key() : path + "." + it.key();
        if (v.is_object()) {
            render_object(v, name, os);
        } else if (v.is_array() && !v.empty() && v.front().is_object()) {
            for (std::size_t k = 0; k < v.size(); ++k) render_object(v[k], name + "[" + std::to_string(k) + "]", os);
        } else if (v.is_array() && !numeric_array(v)) {
            os << name << ": " << v.dump() << "\n";
        } else if (!v.is_array()) {
            os << name << ": " << cell(v) << "\n";
        }
    }
    for (const auto& g : array_groups(j)) {
        os << "\n" << (path.empty() ? std::string("table") : path) << "\n";
        os << "index";
        for (const auto& c : g) os << "\t" << c;
        os << "\n";
        const std::size_t n = j.at(g.front()).size();
        for (std::size_t r = 0; r < n; ++r) {
            os << r;
            for (const auto& c : g) os << "\t" << cell(j.at(c)[r]);
            os << "\n";
        }
        os << "\n";
    }
}

std::string strip_indices(const std::string& s) {
    std::string out;
    bool in = false;
    for (char c : s) {
        if (c == '[') in = true;
        if (!in) out += c;
        if (c == ']') in = false;
    }
    return out;
}

// numeric scalars of an object form a one-row group ahead of its array groups
std::vector<std::vector<std::string>> row_groups(const Json& obj) {
    std::vector<std::vector<std::string>> groups;
    std::vector<std::string> scalars;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (it.value().is_number() || it.value().is_boolean()) scalars.push_back(it.key());
    if (!scalars.empty()) groups.push_back(scalars);
    for (auto& g : array_groups(obj)) groups.push_back(std::move(g));
    return groups;
}

std::string cell_at(const Json& v, std::size_t r) { return cell(v.is_array() ? v[r] : v); }

void collect_blocks(const Json& j, const std::string& path, std::vector<std::string>& order,
                    std::map<std::string, Block>& blocks) {
    for (const auto& g : row_groups(j)) {
        std::string key = strip_indices(path);
        for (const auto& c : g) key += "|" + c;
        auto [it, fresh] = blocks.try_emplace(key);
        if (fresh) {
            order.push_back(key);
            it->second.columns = g;
        }
        const auto& first = j.at(g.front());
        const std::size_t n = first.is_array() ? first.size() : 1;
        for (std::size_t r = 0; r < n; ++r) {
            it->second.rows.emplace_back(path, r);
            std::vector<std::string> row;
            for (const auto& c : g) row.push_back(cell_at(j.at(c), r));
            it->second.cells.push_back(std::move(row));
        }
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& v = it.value();
        if (path.empty() && it.key() == "config") continue;
        const std::string name = path.empty() ? it.key() : path + "." + it.key();
        if (v.is_object()) collect_blocks(v, name, order, blocks);
        else if (v.is_array() && !v.empty() && v.front().is_object())
            for (std::size_t k = 0; k < v.size(); ++k)
                collect_blocks(v[k], name + "[" + std::to_string(k) + "]", order, blocks);
    }
}

}  // namespace

std::string render_table(const Json& j) {
    if (!j.is_object()) throw DomainError("table rendering needs a JSON object");
    std::ostringstream os;
    render_object(j, "", os);
    return os.str();
}

std::string render_csv(const Json& j) {
    if (!j.is_object()) throw DomainError("CSV rendering needs a JSON object");
    std::vector<std::string> order;
    std::map<std::string, Block> blocks;
    collect_blocks(j, "", order, blocks);
    std::ostringstream os;
    bool first = true;
    for (const auto& key : order) {
        const auto& b = blocks.at(key);
        if (!first) os << "\n";
        first = false;
        os << "item,index";
        for (const auto& c : b.columns) os << "," << c;
        os << "\n";
        for (std::size_t r = 0; r < b.rows.size(); ++r) {
            os << (b.rows[r].first.empty() ? "." : b.rows[r].first) << "," << b.rows[r].second;
            for (const auto& c : b.cells[r]) os << "," << c;
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace fracexp
