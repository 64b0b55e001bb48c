#pragma once

#include <stdexcept>
#include <string>

namespace nltab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct TypeMismatch : Error {
  explicit TypeMismatch(const std::string& msg) : Error("type mismatch: " + msg) {}
};

struct UnboundVariable : Error {
  explicit UnboundVariable(const std::string& name) : Error("unbound variable: " + name) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error("validation error: " + msg) {}
};

struct UnknownTag : Error {
  explicit UnknownTag(const std::string& tag) : Error("unknown pos tag: " + tag) {}
};

struct UnmappedAtom : Error {
  explicit UnmappedAtom(const std::string& atom) : Error("no simplification image for atom: " + atom) {}
};

struct FixDivergence : Error {
  explicit FixDivergence(const std::string& msg) : Error("term fixing did not reach a fixpoint: " + msg) {}
};

struct RaiseFailure : Error {
  explicit RaiseFailure(const std::string& msg) : Error("type raising failed: " + msg) {}
};

struct MissingPrediction : Error {
  explicit MissingPrediction(const std::string& id) : Error("missing prediction for problem: " + id) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& msg) : Error("internal error: " + msg) {}
};

}  // namespace nltab
