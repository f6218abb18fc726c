#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace automas {

// Base for all library errors. Subcommands map these to exit code 1.
class AutomasError : public std::runtime_error {
public:
    explicit AutomasError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data. Carries the 1-based line number when parsing
// line-delimited files (0 when not applicable).
class ParseError : public AutomasError {
public:
    ParseError(const std::string& what, int line = 0) : AutomasError(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Failure talking to a model backend. Transport problems are retriable,
// malformed responses are not.
class BackendError : public AutomasError {
public:
    BackendError(const std::string& what, bool retriable) : AutomasError(what), retriable_(retriable) {}
    bool retriable() const { return retriable_; }

private:
    bool retriable_;
};

class IngestError : public AutomasError {
public:
    using AutomasError::AutomasError;
};

// Some agents could not be enriched; lists the ids left untouched.
class EnrichmentError : public AutomasError {
public:
    EnrichmentError(const std::string& what, std::vector<std::string> unenriched)
        : AutomasError(what), unenriched_(std::move(unenriched)) {}
    const std::vector<std::string>& unenriched_ids() const { return unenriched_; }

private:
    std::vector<std::string> unenriched_;
};

class PlanError : public AutomasError {
public:
    using AutomasError::AutomasError;
};

class RouteError : public AutomasError {
public:
    using AutomasError::AutomasError;
};

class EvalError : public AutomasError {
public:
    using AutomasError::AutomasError;
};

} // namespace automas
