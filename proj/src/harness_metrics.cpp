#include "celearn/harness.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "celearn/common.hpp"

namespace celearn {

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_number(std::string& out, long long v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

double parse_double(std::string_view tok, const std::string& path, int line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw IoError(path + ":" + std::to_string(line) +
                         ": bad numeric field '" + std::string(tok) + "'");
  return v;
}

long long parse_int(std::string_view tok, const std::string& path, int line) {
  long long v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw IoError(path + ":" + std::to_string(line) +
                         ": bad integer field '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string metrics_header(int num_agents,
                           const std::vector<int>& action_counts) {
  if (static_cast<int>(action_counts.size()) != num_agents)
    throw DimensionMismatch("metrics_header: action_counts size mismatch");
  std::string h = "n,state,joint,miscoord,max_pos_regret,lyapunov";
  for (int k = 0; k < num_agents; ++k) {
    const std::string ks = std::to_string(k);
    h += ",u" + ks + ",cost" + ks + ",lambda" + ks + ",mean_u" + ks +
         ",mean_cost" + ks + ",disc_u" + ks + ",disc_cost" + ks;
  }
  for (int k = 0; k < num_agents; ++k)
    for (int a = 0; a < action_counts[k]; ++a)
      h += ",freq" + std::to_string(k) + "_" + std::to_string(a);
  h += "\n";
  return h;
}

void append_metrics_row(std::string& out, const MetricsRecord& r) {
  append_number(out, r.n);
  out += ',';
  append_number(out, static_cast<long long>(r.state));
  out += ',';
  append_number(out, static_cast<long long>(r.joint));
  out += ',';
  out += r.miscoordination ? '1' : '0';
  out += ',';
  append_number(out, r.max_pos_regret);
  out += ',';
  append_number(out, r.lyapunov);
  const std::size_t agents = r.utility.size();
  for (std::size_t k = 0; k < agents; ++k) {
    out += ',';
    append_number(out, r.utility[k]);
    out += ',';
    append_number(out, r.cost[k]);
    out += ',';
    append_number(out, r.lambda[k]);
    out += ',';
    append_number(out, r.mean_utility[k]);
    out += ',';
    append_number(out, r.mean_cost[k]);
    out += ',';
    append_number(out, r.disc_utility[k]);
    out += ',';
    append_number(out, r.disc_cost[k]);
  }
  for (const auto& freqs : r.action_freq)
    for (double f : freqs) {
      out += ',';
      append_number(out, f);
    }
  out += '\n';
}

std::vector<MetricsRecord> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open metrics file");
  std::string line;
  if (!std::getline(in, line))
    throw IoError(path + ": empty metrics file");

  // Recover the agent count and action counts from the header.
  auto cols = split_csv(line);
  if (cols.size() < 6 || cols[0] != "n")
    throw IoError(path + ": unrecognised metrics header");
  int num_agents = 0;
  std::size_t i = 6;
  while (i < cols.size() &&
         cols[i] == "u" + std::to_string(num_agents)) {
    i += 7;
    ++num_agents;
  }
  std::vector<int> action_counts(num_agents, 0);
  for (int k = 0; k < num_agents; ++k) {
    const std::string prefix = "freq" + std::to_string(k) + "_";
    while (i < cols.size() &&
           std::string(cols[i]).rfind(prefix, 0) == 0) {
      ++action_counts[k];
      ++i;
    }
  }
  if (i != cols.size())
    throw IoError(path + ": unrecognised metrics header");

  std::vector<MetricsRecord> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != cols.size())
      throw IoError(path + ":" + std::to_string(lineno) +
                           ": wrong field count");
    MetricsRecord r;
    std::size_t p = 0;
    r.n = parse_int(f[p++], path, lineno);
    r.state = static_cast<int>(parse_int(f[p++], path, lineno));
    r.joint = static_cast<int>(parse_int(f[p++], path, lineno));
    r.miscoordination = parse_int(f[p++], path, lineno) != 0;
    r.max_pos_regret = parse_double(f[p++], path, lineno);
    r.lyapunov = parse_double(f[p++], path, lineno);
    r.utility.resize(num_agents);
    r.cost.resize(num_agents);
    r.lambda.resize(num_agents);
    r.mean_utility.resize(num_agents);
    r.mean_cost.resize(num_agents);
    r.disc_utility.resize(num_agents);
    r.disc_cost.resize(num_agents);
    for (int k = 0; k < num_agents; ++k) {
      r.utility[k] = parse_double(f[p++], path, lineno);
      r.cost[k] = parse_double(f[p++], path, lineno);
      r.lambda[k] = parse_double(f[p++], path, lineno);
      r.mean_utility[k] = parse_double(f[p++], path, lineno);
      r.mean_cost[k] = parse_double(f[p++], path, lineno);
      r.disc_utility[k] = parse_double(f[p++], path, lineno);
      r.disc_cost[k] = parse_double(f[p++], path, lineno);
    }
    r.action_freq.resize(num_agents);
    for (int k = 0; k < num_agents; ++k) {
      r.action_freq[k].resize(action_counts[k]);
      for (int a = 0; a < action_counts[k]; ++a)
        r.action_freq[k][a] = parse_double(f[p++], path, lineno);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace celearn
