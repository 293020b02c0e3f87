#pragma once

#include "minsess/syntax.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace minsess {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int l, int c)
        : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l), column(c) {}
};

struct SourceFile {
    std::vector<std::pair<std::string, TypeRef>> aliases; // type NAME = T
    std::vector<std::pair<Name, TypeRef>> free;           // free n : T
    ProcRef entry;
};

SourceFile parse_file(const std::string& text);
ProcRef parse_proc(const std::string& text);
TypeRef parse_type(const std::string& text);
ValueRef parse_value(const std::string& text);

std::string print(const ProcRef& p);
std::string print(const TypeRef& t);
std::string print(const ValueRef& v);
std::string print(const Name& n);
std::string print_file(const SourceFile& f);

// Expands n!<<m~>>.P and n?((x~)).Q into abstraction passing.
ProcRef desugar_name_passing(const ProcRef& p);
ValueRef desugar_name_passing(const ValueRef& v);
TypeRef desugar_np_type(const TypeRef& t);
bool has_name_passing(const ProcRef& p);

} // namespace minsess
