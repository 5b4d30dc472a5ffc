// Copyright 2026 The cpsre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Umbrella header: the whole library.

#pragma once

#include "cpsre/ast.hpp"
#include "cpsre/ast_json.hpp"
#include "cpsre/charmodel.hpp"
#include "cpsre/compiler.hpp"
#include "cpsre/early_errors.hpp"
#include "cpsre/executor.hpp"
#include "cpsre/expected.hpp"
#include "cpsre/optimizer.hpp"
#include "cpsre/parser.hpp"
#include "cpsre/stack.hpp"
#include "cpsre/unicode_data.hpp"
#include "cpsre/harness/corpus.hpp"
#include "cpsre/harness/escape.hpp"
#include "cpsre/harness/generator.hpp"
#include "cpsre/harness/invariants.hpp"
#include "cpsre/harness/oracle.hpp"
