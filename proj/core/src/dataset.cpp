#include "cms/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cms/errors.hpp"

namespace cms {

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t' && c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& tok, std::size_t line_no) {
  if (tok.empty()) throw ParseError("empty numeric field", line_no);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) {
    throw ParseError("bad numeric field '" + tok + "'", line_no);
  }
  return v;
}

}  // namespace

void ConflictTable::validate() const {
  if (xapp.empty()) throw ParseError("table has no xApp id");
  if (swept.empty()) throw ParseError("table has no swept parameter");
  if (rows.size() < 2) throw ParseError("table must have at least 2 rows");
  if (kpi_ids.empty()) throw ParseError("table must have at least one KPI column");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (!r.params.count(swept)) {
      throw ParseError("row missing swept parameter " + swept.str(), i + 1);
    }
    for (const ParamId& p : fixed_params) {
      if (!r.params.count(p)) throw ParseError("row missing parameter " + p.str(), i + 1);
      if (r.params.at(p) != rows.front().params.at(p)) {
        throw ParseError("fixed parameter " + p.str() + " varies across rows", i + 1);
      }
    }
    for (const KpiId& k : kpi_ids) {
      if (!r.kpis.count(k)) throw ParseError("row missing KPI " + k.str(), i + 1);
    }
    if (i > 0 && !(r.params.at(swept) > rows[i - 1].params.at(swept))) {
      throw ParseError("swept column not strictly ascending", i + 1);
    }
  }
}

double ConflictTable::swept_value(std::size_t i) const { return rows.at(i).params.at(swept); }

std::vector<double> ConflictTable::swept_values() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const Row& r : rows) out.push_back(r.params.at(swept));
  return out;
}

std::vector<double> ConflictTable::kpi_column(const KpiId& k) const {
  if (!has_kpi(k)) {
    throw SchemaError("table for " + xapp.str() + " has no KPI column " + k.str(), {k.str()});
  }
  std::vector<double> out;
  out.reserve(rows.size());
  for (const Row& r : rows) out.push_back(r.kpis.at(k));
  return out;
}

bool ConflictTable::has_kpi(const KpiId& k) const {
  return std::find(kpi_ids.begin(), kpi_ids.end(), k) != kpi_ids.end();
}

ConflictTable generate_table(const XAppSpec& spec,
                             const std::map<KpiId, GaussianKpiModel>& models,
                             const ParamId& swept, const ParamRange& range,
                             const Assignment& fixed) {
  spec.validate();
  range.validate();

  std::set<ParamId> referenced;
  for (const KpiDef& k : spec.kpis) {
    auto it = models.find(k.id);
    if (it == models.end()) {
      throw ConfigError("no analytic model for KPI " + k.id.str(), "dataset");
    }
    const auto refs = it->second.referenced_params();
    referenced.insert(refs.begin(), refs.end());
  }
  if (!referenced.count(swept)) {
    throw ConfigError("swept parameter " + swept.str() + " does not affect any KPI of " +
                          spec.id.str(),
                      "dataset");
  }
  for (const ParamId& p : referenced) {
    if (p != swept && !fixed.count(p)) {
      throw MissingParam("fixed value for " + p.str() + " required to sweep " + swept.str());
    }
  }

  ConflictTable t;
  t.xapp = spec.id;
  t.swept = swept;
  for (const ParamId& p : referenced) {
    if (p != swept) t.fixed_params.push_back(p);
  }
  std::sort(t.fixed_params.begin(), t.fixed_params.end(),
            [](const ParamId& a, const ParamId& b) { return natural_less(a.str(), b.str()); });
  for (const KpiDef& k : spec.kpis) t.kpi_ids.push_back(k.id);

  const std::size_t n = range.grid_size();
  t.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ConflictTable::Row row;
    for (const ParamId& p : t.fixed_params) row.params[p] = fixed.at(p);
    row.params[swept] = range.at(i);
    for (const KpiDef& k : spec.kpis) {
      row.kpis[k.id] = eval_kpi(models.at(k.id), row.params);
    }
    t.rows.push_back(std::move(row));
  }
  t.validate();
  return t;
}

void save_table(const ConflictTable& table, const std::filesystem::path& path) {
  table.validate();
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");

  out << "# cms-table v1\n";
  out << "# xapp: " << table.xapp.str() << "\n";
  out << "# kpis:";
  for (const KpiId& k : table.kpi_ids) out << " " << k.str();
  out << "\n";

  out << table.swept.str();
  for (const ParamId& p : table.fixed_params) out << "," << p.str();
  for (const KpiId& k : table.kpi_ids) out << "," << k.str();
  out << "\n";

  for (const ConflictTable::Row& r : table.rows) {
    out << fmt9(r.params.at(table.swept));
    for (const ParamId& p : table.fixed_params) out << "," << fmt9(r.params.at(p));
    for (const KpiId& k : table.kpi_ids) out << "," << fmt9(r.kpis.at(k));
    out << "\n";
  }
}

namespace {

ConflictTable load_table_impl(const std::filesystem::path& path,
                              const std::map<std::string, std::string>* column_map) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  auto mapped = [&](const std::string& name) -> std::string {
    if (!column_map) return name;
    auto it = column_map->find(name);
    return it == column_map->end() ? name : it->second;
  };
  auto meta_override = [&](const std::string& key) -> std::string {
    if (!column_map) return {};
    auto it = column_map->find(key);
    return it == column_map->end() ? std::string{} : it->second;
  };

  ConflictTable t;
  std::string xapp_meta = meta_override("#xapp");
  std::vector<std::string> kpi_meta;
  {
    // a mapping may declare the KPI columns directly (space-separated)
    const std::string kpis = meta_override("#kpis");
    std::istringstream ss(kpis);
    std::string k;
    while (ss >> k) kpi_meta.push_back(k);
  }

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> data;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "xapp:" && xapp_meta.empty()) {
        ss >> xapp_meta;
      } else if (key == "kpis:" && kpi_meta.empty()) {
        std::string k;
        while (ss >> k) kpi_meta.push_back(mapped(k));
      }
      continue;
    }
    if (header.empty()) {
      for (const std::string& tok : split_csv(line)) {
        if (tok.empty()) throw ParseError("empty header field", line_no);
        header.push_back(mapped(tok));
      }
      continue;
    }
    const auto toks = split_csv(line);
    if (toks.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(toks.size()),
                       line_no);
    }
    std::vector<double> row;
    row.reserve(toks.size());
    for (const std::string& tok : toks) row.push_back(parse_number(tok, line_no));
    data.push_back(std::move(row));
  }

  if (header.empty()) throw ParseError("no header row in " + path.string());
  if (xapp_meta.empty()) throw ParseError("missing '# xapp:' metadata in " + path.string());
  if (kpi_meta.empty()) {
    // Fall back: columns declared nowhere are split heuristically is not
    // acceptable; require the KPI list either in metadata or the mapping.
    throw ParseError("missing '# kpis:' metadata in " + path.string());
  }

  t.xapp = XAppId{xapp_meta};
  const std::string swept_override = meta_override("#swept");
  t.swept = ParamId{swept_override.empty() ? header.front() : swept_override};

  std::vector<std::string> missing;
  for (const std::string& k : kpi_meta) {
    if (std::find(header.begin(), header.end(), k) == header.end()) missing.push_back(k);
  }
  if (!missing.empty()) {
    std::string msg = "missing KPI column(s):";
    for (const std::string& k : missing) msg += " " + k;
    throw SchemaError(msg, missing);
  }

  std::size_t swept_col = 0;
  bool swept_found = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == t.swept.str()) {
      swept_col = c;
      swept_found = true;
      break;
    }
  }
  if (!swept_found) throw SchemaError("swept column " + t.swept.str() + " not in header");

  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == swept_col) continue;
    if (std::find(kpi_meta.begin(), kpi_meta.end(), header[c]) != kpi_meta.end()) {
      t.kpi_ids.push_back(KpiId{header[c]});
    } else {
      t.fixed_params.push_back(ParamId{header[c]});
    }
  }

  for (const auto& row : data) {
    ConflictTable::Row r;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string& name = header[c];
      if (c == swept_col) {
        r.params[t.swept] = row[c];
      } else if (std::find(kpi_meta.begin(), kpi_meta.end(), name) != kpi_meta.end()) {
        r.kpis[KpiId{name}] = row[c];
      } else {
        r.params[ParamId{name}] = row[c];
      }
    }
    t.rows.push_back(std::move(r));
  }

  if (t.rows.size() >= 2) {
    // Canonicalize strictly descending sweeps to ascending; anything else
    // non-monotone is rejected by validate().
    bool descending = true;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      if (!(t.rows[i].params.at(t.swept) < t.rows[i - 1].params.at(t.swept))) {
        descending = false;
        break;
      }
    }
    if (descending) std::reverse(t.rows.begin(), t.rows.end());
  }

  t.validate();
  return t;
}

}  // namespace

ConflictTable load_table(const std::filesystem::path& path) {
  return load_table_impl(path, nullptr);
}

ConflictTable load_table(const std::filesystem::path& path,
                         const std::map<std::string, std::string>& column_map) {
  return load_table_impl(path, &column_map);
}

void validate_against_spec(const ConflictTable& table, const XAppSpec& spec) {
  if (table.xapp != spec.id) {
    throw SchemaError("table belongs to " + table.xapp.str() + ", expected " + spec.id.str());
  }
  std::vector<std::string> missing;
  for (const KpiDef& k : spec.kpis) {
    if (!table.has_kpi(k.id)) missing.push_back(k.id.str());
  }
  if (!missing.empty()) {
    std::string msg = "missing KPI column(s):";
    for (const std::string& k : missing) msg += " " + k;
    throw SchemaError(msg, missing);
  }
}

}  // namespace cms
