/*   Copyright 2026 the logicloss authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace logicloss {

/// Root of every exception thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric argument is outside its documented domain (e.g. a truth degree
/// outside [0, 1], a negative generator argument).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A connective was applied with the wrong number of operands.
class ArityError : public Error {
public:
    using Error::Error;
};

/// The requested operation is undefined for the selected semantics
/// (e.g. asking the min family for an additive generator).
class UnsupportedConnective : public Error {
public:
    using Error::Error;
};

/// Expression evaluation was given no value for a named input.
class UnboundInput : public Error {
public:
    explicit UnboundInput(const std::string& name)
        : Error("unbound input: " + name), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// Expression evaluation produced NaN or an infinity.
class NonFiniteResult : public Error {
public:
    NonFiniteResult(std::int64_t node, const std::string& what)
        : Error(what), node_(node) {}
    std::int64_t node() const { return node_; }

private:
    std::int64_t node_ = -1;
};

/// Structured data (records, bindings, checkpoints) failed a consistency check.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A shipped data asset does not match its recorded counts or checksum.
class DataFileCorrupt : public Error {
public:
    using Error::Error;
};

/// The sampling pool cannot fill the requested batch.
class PoolTooSmall : public Error {
public:
    using Error::Error;
};

/// A tensor-like argument has the wrong dimensions for the model.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// The training loss or one of its gradients stopped being finite.
class NonFiniteLoss : public Error {
public:
    NonFiniteLoss(int epoch, int batch, const std::string& what)
        : Error(what + " (epoch " + std::to_string(epoch) + ", batch " +
                std::to_string(batch) + ")"),
          epoch_(epoch),
          batch_(batch) {}
    int epoch() const { return epoch_; }
    int batch() const { return batch_; }

private:
    int epoch_ = 0;
    int batch_ = 0;
};

/// An entailed-question id does not name any record in the dataset.
class DanglingEntailedId : public Error {
public:
    explicit DanglingEntailedId(const std::string& id)
        : Error("entailed id names no record: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

/// An aggregate was asked for on an empty input.
class EmptyInput : public Error {
public:
    using Error::Error;
};

/// The prediction set does not cover a gold record.
class MissingPrediction : public Error {
public:
    explicit MissingPrediction(const std::string& id)
        : Error("missing prediction for record: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace logicloss
