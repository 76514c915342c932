#pragma once

#include <stdexcept>
#include <string>

namespace hatebench {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- core-data ---------------------------------------------------------

class DuplicateId : public Error {
public:
    using Error::Error;
};

class InsufficientAnnotations : public Error {
public:
    using Error::Error;
};

class UndefinedAlpha : public Error {
public:
    using Error::Error;
};

class EmptyClass : public Error {
public:
    using Error::Error;
};

class LabelMappingError : public Error {
public:
    LabelMappingError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row(row) {}
    std::size_t row;
};

// --- llm-generation ----------------------------------------------------

class EmptyAxis : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class UnknownJailbreak : public Error {
public:
    using Error::Error;
};

class ClientExhausted : public Error {
public:
    using Error::Error;
};

// --- detector-gateway --------------------------------------------------

class UnknownDetector : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

// Non-retriable provider response (4xx).
class ProviderRejected : public Error {
public:
    ProviderRejected(const std::string& what, int status)
        : Error(what + " (status " + std::to_string(status) + ")"), status(status) {}
    int status;
};

// Retriable failures exhausted the retry budget.
class QueryFailed : public Error {
public:
    using Error::Error;
};

class ThresholdError : public Error {
public:
    using Error::Error;
};

// --- evaluation --------------------------------------------------------

class MissingVerdict : public Error {
public:
    explicit MissingVerdict(const std::string& sample_id)
        : Error("no verdict for sample " + sample_id), sample_id(sample_id) {}
    std::string sample_id;
};

// --- attack-engine -----------------------------------------------------

// Victim does not currently label the input hate; attack denominators
// only contain detected-hate inputs.
class NotApplicable : public Error {
public:
    using Error::Error;
};

class AttackAborted : public Error {
public:
    using Error::Error;
};

// --- surrogate-stealing ------------------------------------------------

class DegenerateDataset : public Error {
public:
    using Error::Error;
};

class UnsupportedBackbone : public Error {
public:
    using Error::Error;
};

// --- cli-reporting -----------------------------------------------------

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, const std::string& path)
        : Error(what + " (at " + path + ")"), path(path) {}
    std::string path;
};

class EmptyReport : public Error {
public:
    using Error::Error;
};

} // namespace hatebench
