// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "abi.hpp"
#include "cft.hpp"
#include "checker.hpp"
#include "detect.hpp"
#include "error.hpp"
#include "inference.hpp"
#include "keccak.hpp"
#include "layout.hpp"
#include "miner.hpp"
#include "persistence.hpp"
#include "property.hpp"
#include "raw_record.hpp"
#include "trace.hpp"
#include "trace_view.hpp"
#include "typed_value.hpp"
#include "varref.hpp"
#include "word.hpp"
