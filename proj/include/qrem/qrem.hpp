// Copyright 2026 The qrem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QREM_QREM_HPP
#define QREM_QREM_HPP

#include "qrem/bitstring.hpp"
#include "qrem/distribution.hpp"
#include "qrem/errors.hpp"
#include "qrem/ibu.hpp"
#include "qrem/least_squares.hpp"
#include "qrem/local_protocol.hpp"
#include "qrem/mixture.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/oracles.hpp"
#include "qrem/rng.hpp"
#include "qrem/synthetic.hpp"
#include "qrem/version.hpp"

#endif
