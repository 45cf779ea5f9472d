#pragma once

#include <stdexcept>
#include <string>

namespace bootsim {

// Error taxonomy shared across modules. The CLI maps these onto exit codes.

// Invalid experiment parameters (zero sizes, divisibility violations, bad input files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument to a statistical or PRNG operation (empty input, zero bound).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pooling summary statistics with unequal per-part counts.
class AggregationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fabric misuse: self-send, invalid rank, message left unconsumed at termination.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Memory accounting misuse: freeing more floats than are resident.
class AccountingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All live virtual processes blocked on receives that can never be satisfied.
class DeadlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A strategy's peak per-process memory exceeds the configured cap.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synchronized-stream invariant broken: per-sample partial counts do not sum to D.
class SyncFaultError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bootsim
