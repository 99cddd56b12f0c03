#include "vodcache/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vodcache {

namespace {

std::string print(const char* fmt, double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Cell metric(double v) { return {print("%.9g", v), true}; }
Cell exact(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {std::string(buf, res.ptr), true};
}
Cell integer(long long v) { return {std::to_string(v), true}; }
Cell text(std::string s) { return {std::move(s), false}; }

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width differs from header");
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Table& table) {
    out << "# " << kCsvSchema << ' ' << table.kind << '\n';
    for (const auto& c : table.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_escape(table.columns[i]);
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i].text);
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& table) {
    nlohmann::ordered_json doc;
    doc["schema"] = kCsvSchema;
    doc["kind"] = table.kind;
    doc["comments"] = table.comments;
    doc["columns"] = table.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& cell = row[i];
            double v = 0.0;
            const auto res = std::from_chars(cell.text.data(), cell.text.data() + cell.text.size(), v);
            // JSON has no inf/nan; those stay strings.
            if (cell.numeric && res.ec == std::errc() && res.ptr == cell.text.data() + cell.text.size() &&
                std::isfinite(v))
                obj[table.columns[i]] = nlohmann::ordered_json::parse(cell.text);
            else
                obj[table.columns[i]] = cell.text;
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
}

void save_table(const std::filesystem::path& dir, const std::string& name, const Table& table, bool json) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / (name + ".csv"), std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / (name + ".csv")).string());
        write_csv(f, table);
    }
    if (json) {
        std::ofstream f(dir / (name + ".json"), std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / (name + ".json")).string());
        write_json(f, table);
    }
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line) || line.rfind(std::string("# ") + kCsvSchema + " ", 0) != 0)
        throw std::runtime_error(path.string() + ": missing schema line");
    t.kind = line.substr(std::string("# ").size() + std::string(kCsvSchema).size() + 1);
    bool header = false;
    while (std::getline(in, line)) {
        if (!header && line.rfind("# ", 0) == 0) {
            t.comments.push_back(line.substr(2));
            continue;
        }
        auto fields = csv_split(line);
        if (!header) {
            t.columns = std::move(fields);
            header = true;
            continue;
        }
        std::vector<Cell> row;
        for (auto& f : fields) row.push_back({std::move(f), true});
        t.add(std::move(row));
    }
    return t;
}

std::vector<double> numeric_column(const Table& table, const std::string& column) {
    std::size_t idx = table.columns.size();
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        if (table.columns[i] == column) idx = i;
    if (idx == table.columns.size()) throw std::runtime_error("no column '" + column + "'");
    std::vector<double> out;
    for (const auto& row : table.rows) {
        const auto& s = row[idx].text;
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw std::runtime_error("column '" + column + "' holds non-numeric '" + s + "'");
        out.push_back(v);
    }
    return out;
}

Table sim_report_table(const SimReport& rep, const std::string& scenario_id) {
    Table t;
    t.kind = "simulation";
    t.comments.push_back("mechanism " + rep.mechanism + ", prng " + rep.prng);
    t.columns = {"scenario_id", "pattern", "seed", "horizon_s", "chunk_mbit", "avg_mhz", "requests", "violations"};
    t.add({text(scenario_id), text(rep.pattern), integer((long long)rep.seed), metric(rep.horizon_s),
           metric(rep.chunk_mbit), metric(rep.avg_mhz), integer((long long)rep.request_count),
           integer((long long)rep.deadline_violations)});
    return t;
}

Table plan_table(const VideoLibrary& lib, const proactive::ProactivePlan& plan) {
    Table t;
    t.kind = "plan";
    t.comments.push_back("pattern " + plan.pattern);
    t.columns = {"video", "p_i", "l_mbit", "b_mhz", "wait_s"};
    for (std::size_t i = 0; i < lib.size(); ++i)
        t.add({integer((long long)i + 1), exact(lib.popularity(i)), exact(plan.cache.mbit[i]),
               exact(plan.bandwidth.mhz[i]), metric(plan.per_video_wait[i])});
    return t;
}

Table schedule_table(const GebbSchedule& sched) {
    Table t;
    t.kind = "schedule";
    std::ostringstream c;
    c << "n " << sched.n << ", subchannel_mhz " << metric(sched.subchannel_mhz).text << ", wait_s "
      << metric(sched.wait_s).text << ", cached_mbit " << metric(sched.cached_mbit).text;
    t.comments.push_back(c.str());
    t.columns = {"k", "D_k_s", "S_k_mbit"};
    for (std::size_t k = 0; k < sched.durations_s.size(); ++k)
        t.add({integer((long long)k + 1), metric(sched.durations_s[k]), metric(sched.lengths_mbit[k])});
    return t;
}

}  // namespace vodcache
