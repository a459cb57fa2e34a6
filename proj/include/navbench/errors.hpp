#pragma once

#include <stdexcept>
#include <string>

namespace navbench {

// Violated precondition or internal invariant. Callers treat this as a bug,
// not a recoverable condition; the episode runner converts it into an
// aborted-episode record.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Scene generation gave up after the retry budget (e.g. goal unreachable).
class GenerationError : public std::runtime_error {
public:
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Network-level failure talking to a vote oracle, after retries.
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or unsupported on-disk document (scene file, config, report).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw ContractViolation(msg);
}

} // namespace navbench
