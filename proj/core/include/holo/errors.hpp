#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holo {

/// Base class for every error the library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- expression language ---

struct SyntaxError : Error {
  std::size_t offset;  // byte offset into the source string
  SyntaxError(std::size_t off, const std::string& what)
      : Error("syntax error at offset " + std::to_string(off) + ": " + what), offset(off) {}
};

struct ArityError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

// --- Lie groups ---

struct GroupMismatch : Error {
  using Error::Error;
};

struct CutLocus : Error {
  using Error::Error;
};

// --- geometry / paths ---

struct OutOfChart : Error {
  using Error::Error;
};

struct EndpointMismatch : Error {
  using Error::Error;
};

struct SegmentLeavesChart : Error {
  using Error::Error;
};

struct BoundaryMismatch : Error {
  using Error::Error;
};

struct NotALoop : Error {
  using Error::Error;
};

struct StepTooCoarse : Error {
  double estimate;
  explicit StepTooCoarse(double est)
      : Error("step-halving estimate " + std::to_string(est) + " exceeds 1e-4"), estimate(est) {}
};

// --- torsors / cocycles / reconstruction ---

struct TorsorMismatch : Error {
  using Error::Error;
};

struct MissingAccessPath : Error {
  using Error::Error;
};

struct NotAHomomorphism : Error {
  using Error::Error;
};

// --- configuration files ---

/// Carries the JSON-pointer-like path of the offending config entry.
struct ConfigError : Error {
  std::string path;
  ConfigError(std::string p, const std::string& what)
      : Error(p + ": " + what), path(std::move(p)) {}
};

}  // namespace holo
