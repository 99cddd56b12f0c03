#pragma once

// Tabular output. Every CSV starts with `# vodcache-csv v1 <kind>`, may carry
// further `#` comment lines, then a header row and data rows. The JSON mirror
// holds the same table.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "vodcache/proactive_alloc.hpp"
#include "vodcache/proactive_gebb.hpp"
#include "vodcache/reactive_sim.hpp"

namespace vodcache {

inline constexpr const char* kCsvSchema = "vodcache-csv v1";

struct Cell {
    std::string text;
    bool numeric = false;
};

/// 9 significant digits, for metrics.
Cell metric(double v);
/// Shortest form that reads back to the same double (allocation vectors).
Cell exact(double v);
Cell integer(long long v);
Cell text(std::string s);

struct Table {
    std::string kind;
    std::vector<std::string> comments;  ///< written as `# <comment>` after the schema line
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);
/// Writes <dir>/<name>.csv, plus <name>.json when `json` is set.
void save_table(const std::filesystem::path& dir, const std::string& name, const Table& table, bool json);

/// Reads a table written by write_csv; comment lines are returned in `comments`.
Table read_csv(const std::filesystem::path& path);

Table sim_report_table(const SimReport& rep, const std::string& scenario_id);
Table plan_table(const VideoLibrary& lib, const proactive::ProactivePlan& plan);
Table schedule_table(const GebbSchedule& sched);

/// Column `column` of a table as doubles.
std::vector<double> numeric_column(const Table& table, const std::string& column);

}  // namespace vodcache
