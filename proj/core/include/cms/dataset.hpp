#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cms/model.hpp"

namespace cms {

// Sampled mapping from ICP settings to raw KPI values for one xApp, swept
// along one parameter with every other referenced ICP held fixed.
struct ConflictTable {
  XAppId xapp;
  ParamId swept;
  std::vector<ParamId> fixed_params;  // column order, natural-sorted
  std::vector<KpiId> kpi_ids;         // column order

  struct Row {
    Assignment params;             // includes the swept parameter
    std::map<KpiId, double> kpis;  // one value per kpi_ids entry

    bool operator==(const Row&) const = default;
  };
  std::vector<Row> rows;

  bool operator==(const ConflictTable&) const = default;

  // >= 2 rows, swept column strictly ascending, fixed columns constant,
  // every declared KPI present in every row.
  void validate() const;

  std::size_t size() const { return rows.size(); }
  double swept_value(std::size_t i) const;
  std::vector<double> swept_values() const;
  std::vector<double> kpi_column(const KpiId& k) const;  // SchemaError if absent
  bool has_kpi(const KpiId& k) const;
};

// Evaluates the analytic models over `range`, one row per grid point.
// `fixed` must cover every referenced parameter other than `swept`.
ConflictTable generate_table(const XAppSpec& spec,
                             const std::map<KpiId, GaussianKpiModel>& models,
                             const ParamId& swept, const ParamRange& range,
                             const Assignment& fixed);

// Text format: `# cms-table v1` magic, `# xapp:`/`# kpis:` metadata, a header
// row naming the swept column first, then fixed ICP columns, then KPI columns,
// values printed with 9 significant digits. load(save(t)) round-trips exactly
// at that precision.
void save_table(const ConflictTable& table, const std::filesystem::path& path);
ConflictTable load_table(const std::filesystem::path& path);

// Column mapping for externally published tables: renames file columns to the
// canonical ids before parsing. Keys: file column names; values: canonical
// names. Optional keys "#xapp" and "#swept" set metadata absent from the file.
ConflictTable load_table(const std::filesystem::path& path,
                         const std::map<std::string, std::string>& column_map);

// SchemaError (listing the missing columns) unless every KPI of `spec` is a
// column of `table` and the table belongs to that xApp.
void validate_against_spec(const ConflictTable& table, const XAppSpec& spec);

}  // namespace cms
