// Copyright 2026 The progres Authors.
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

#pragma once

#include "progres/candidates.hpp"
#include "progres/csv.hpp"
#include "progres/datamodel.hpp"
#include "progres/dense_vectors.hpp"
#include "progres/evaluation.hpp"
#include "progres/filter_block.hpp"
#include "progres/filter_join.hpp"
#include "progres/filter_nn.hpp"
#include "progres/filter_sort.hpp"
#include "progres/ingest.hpp"
#include "progres/pipeline.hpp"
#include "progres/scheduler.hpp"
#include "progres/sparse_vectorizer.hpp"
