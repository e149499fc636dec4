#ifndef ORLICZ_REPORT_HPP
#define ORLICZ_REPORT_HPP

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "orlicz/solve_report.hpp"

namespace orlicz {

// Minimal JSON value tree with insertion-ordered objects and fixed float
// formatting, so identical runs serialize to identical bytes.
class Json {
public:
  Json() : value_(nullptr) {}
  Json(bool b) : value_(b) {}
  Json(double d) : value_(d) {}
  Json(int i) : value_(static_cast<double>(i)) {}
  Json(long i) : value_(static_cast<double>(i)) {}
  Json(const char* s) : value_(std::string(s)) {}
  Json(std::string s) : value_(std::move(s)) {}
  Json(const std::vector<double>& v);

  static Json object();
  static Json array();

  Json& set(const std::string& key, Json value);  // objects
  Json& push(Json value);                         // arrays

  std::string dump(int indent = 2) const;

private:
  struct Object {
    std::vector<std::pair<std::string, Json>> items;
  };
  struct Array {
    std::vector<Json> items;
  };
  std::variant<std::nullptr_t, bool, double, std::string, std::shared_ptr<Object>,
               std::shared_ptr<Array>>
      value_;
  void dump_to(std::string& out, int indent, int depth) const;
};

Json to_json(const SolveReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace orlicz

#endif
