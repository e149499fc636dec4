#include "orlicz/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

std::string format_number(double d) {
  if (std::isnan(d)) return "null";
  if (std::isinf(d)) return d > 0 ? "1e999" : "-1e999";
  char buf[40];
  if (d == std::floor(d) && std::fabs(d) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", d);
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", d);
  }
  return buf;
}

void escape_to(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
}

}  // namespace

Json::Json(const std::vector<double>& v) {
  auto arr = std::make_shared<Array>();
  for (double d : v) arr->items.emplace_back(d);
  value_ = std::move(arr);
}

Json Json::object() {
  Json j;
  j.value_ = std::make_shared<Object>();
  return j;
}

Json Json::array() {
  Json j;
  j.value_ = std::make_shared<Array>();
  return j;
}

Json& Json::set(const std::string& key, Json value) {
  auto* obj = std::get_if<std::shared_ptr<Object>>(&value_);
  if (!obj) throw ConfigError("Json::set on a non-object");
  (*obj)->items.emplace_back(key, std::move(value));
  return *this;
}

Json& Json::push(Json value) {
  auto* arr = std::get_if<std::shared_ptr<Array>>(&value_);
  if (!arr) throw ConfigError("Json::push on a non-array");
  (*arr)->items.push_back(std::move(value));
  return *this;
}

void Json::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  if (std::holds_alternative<std::nullptr_t>(value_)) {
    out += "null";
  } else if (const bool* b = std::get_if<bool>(&value_)) {
    out += *b ? "true" : "false";
  } else if (const double* d = std::get_if<double>(&value_)) {
    out += format_number(*d);
  } else if (const std::string* s = std::get_if<std::string>(&value_)) {
    escape_to(out, *s);
  } else if (const auto* obj = std::get_if<std::shared_ptr<Object>>(&value_)) {
    if ((*obj)->items.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    for (std::size_t i = 0; i < (*obj)->items.size(); ++i) {
      out += pad_in;
      escape_to(out, (*obj)->items[i].first);
      out += ": ";
      (*obj)->items[i].second.dump_to(out, indent, depth + 1);
      if (i + 1 < (*obj)->items.size()) out += ',';
      out += '\n';
    }
    out += pad + "}";
  } else if (const auto* arr = std::get_if<std::shared_ptr<Array>>(&value_)) {
    if ((*arr)->items.empty()) {
      out += "[]";
      return;
    }
    out += "[";
    for (std::size_t i = 0; i < (*arr)->items.size(); ++i) {
      (*arr)->items[i].dump_to(out, indent, depth + 1);
      if (i + 1 < (*arr)->items.size()) out += ", ";
    }
    out += "]";
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += '\n';
  return out;
}

Json to_json(const SolveReport& r) {
  Json j = Json::object();
  j.set("iterations", r.iterations);
  j.set("converged", r.converged);
  if (!r.failure.empty()) j.set("failure", r.failure);
  j.set("final_residual", r.final_residual);
  j.set("oracle_mode", r.oracle_mode);
  j.set("energy_history", Json(r.energy_history));
  j.set("residual_history", Json(r.residual_history));
  if (!r.cerami_history.empty()) j.set("cerami_history", Json(r.cerami_history));
  if (!r.eps_schedule.empty()) {
    j.set("eps_schedule", Json(r.eps_schedule));
    Json monitors = Json::array();
    for (const auto& b : r.bound_monitor) {
      Json row = Json::object();
      row.set("eps", b.eps);
      row.set("phi_integral", b.phi_integral);
      row.set("flux_integral", b.flux_integral);
      row.set("w11", b.w11);
      monitors.push(std::move(row));
    }
    j.set("bound_monitor", std::move(monitors));
    j.set("bound_R", r.bound_R);
    j.set("eps_energy_history", Json(r.eps_energy_history));
    j.set("eps_dirichlet_history", Json(r.eps_dirichlet_history));
    j.set("pairing_history", Json(r.pairing_history));
    j.set("increment_history", Json(r.increment_history));
    j.set("w11_increment_history", Json(r.w11_increment_history));
  }
  if (r.level != 0.0 || r.r0 != 0.0) {
    j.set("level", r.level);
    j.set("r0", r.r0);
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
}

}  // namespace orlicz
