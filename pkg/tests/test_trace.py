import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from provsim.errors import EmptyTraceError, TraceParseError
from provsim.trace import (
    DemandTrace,
    Job,
    JobTrace,
    normalize_cpus,
    parse_demand_trace,
    parse_swf,
    scale_to_peak,
    serialize_demand_trace,
    window,
)


def swf_line(job_id, submit, runtime, alloc, requested):
    fields = [job_id, submit, -1, runtime, alloc, -1, -1, requested] + [-1] * 10
    return " ".join(str(f) for f in fields)


class TestParseSwf:
    def test_direct_field_mapping(self):
        trace = parse_swf(swf_line(1, 100, 300, 4, 8))
        assert trace.jobs == (Job(id=1, submit_time=100, runtime=300, size=4),)
        assert trace.peak_demand == 4

    def test_requested_fallback_when_alloc_missing(self):
        trace = parse_swf(swf_line(1, 0, 60, -1, 16))
        assert trace.jobs[0].size == 16

    def test_drops_nonpositive_runtime_and_size(self):
        text = "\n".join(
            [
                swf_line(1, 0, 0, 4, 4),      # zero runtime
                swf_line(2, 5, -1, 4, 4),     # negative runtime
                swf_line(3, 10, 60, -1, -1),  # no size at all
                swf_line(4, 15, 60, 2, 2),
            ]
        )
        trace = parse_swf(text)
        assert [j.id for j in trace.jobs] == [4]

    def test_comments_and_blank_lines_ignored(self):
        text = "; SWF header comment\n\n" + swf_line(7, 3, 10, 1, 1) + "\n"
        assert parse_swf(text).jobs[0].id == 7

    def test_malformed_field_names_line_number(self):
        text = swf_line(1, 0, 60, 1, 1) + "\nnot a number " + " ".join(["1"] * 17)
        with pytest.raises(TraceParseError, match="line 2"):
            parse_swf(text)

    def test_too_few_fields_rejected(self):
        with pytest.raises(TraceParseError, match="line 1"):
            parse_swf("1 2 3")

    def test_duplicate_ids_rejected(self):
        text = swf_line(1, 0, 60, 1, 1) + "\n" + swf_line(1, 5, 60, 1, 1)
        with pytest.raises(TraceParseError, match="duplicate job id 1"):
            parse_swf(text)

    def test_empty_after_filtering(self):
        with pytest.raises(EmptyTraceError):
            parse_swf(swf_line(1, 0, 0, 4, 4))

    def test_jobs_sorted_by_submit_time(self):
        text = swf_line(2, 50, 10, 1, 1) + "\n" + swf_line(1, 10, 10, 1, 1)
        trace = parse_swf(text)
        assert [j.submit_time for j in trace.jobs] == [10, 50]

    def test_submit_times_keep_original_offsets(self):
        trace = parse_swf(swf_line(9, 4242, 10, 1, 1))
        assert trace.jobs[0].submit_time == 4242

    def test_real_archive_trace_sizes_within_cluster(self):
        # Runs only when the published 128-node trace is present (see README).
        from conftest import traces_dir

        path = traces_dir() / "NASA-iPSC-1993-3.1-cln.swf"
        if not path.exists():
            pytest.skip("archive trace not available")
        trace = parse_swf(path.read_text())
        assert all(1 <= j.size <= 128 for j in trace.jobs)


class TestParseDemandTrace:
    def test_basic(self):
        trace = parse_demand_trace("0,2\n3600,5\n7200,3")
        assert trace.samples == ((0, 2), (3600, 5), (7200, 3))
        assert trace.peak_demand == 5

    def test_constant_zero(self):
        trace = parse_demand_trace("0,0")
        assert trace.samples == ((0, 0),)
        assert trace.peak_demand == 0

    def test_optional_header(self):
        assert parse_demand_trace("time,demand\n0,1").samples == ((0, 1),)

    def test_unknown_header_rejected(self):
        with pytest.raises(TraceParseError, match="header"):
            parse_demand_trace("when,how_much\n0,1")

    def test_nonmonotonic_time(self):
        with pytest.raises(TraceParseError, match="line 3"):
            parse_demand_trace("0,1\n10,2\n10,3")

    def test_negative_demand(self):
        with pytest.raises(TraceParseError, match="negative demand"):
            parse_demand_trace("0,-1")

    def test_non_integer(self):
        with pytest.raises(TraceParseError, match="line 1"):
            parse_demand_trace("0,two")

    def test_empty(self):
        with pytest.raises(EmptyTraceError):
            parse_demand_trace("")

    def test_round_trip_bit_exact(self):
        text = "time,demand\n0,2\n3600,5\n7200,3\n"
        trace = parse_demand_trace(text)
        assert serialize_demand_trace(trace) == text
        assert parse_demand_trace(serialize_demand_trace(trace)) == trace

    @given(
        st.lists(st.integers(min_value=0, max_value=500), min_size=1, max_size=30,
                 unique=True).map(sorted),
        st.data(),
    )
    def test_round_trip_property(self, times, data):
        demands = data.draw(
            st.lists(st.integers(min_value=0, max_value=10**6),
                     min_size=len(times), max_size=len(times))
        )
        trace = DemandTrace(samples=tuple(zip(times, demands)), peak_demand=max(demands))
        assert parse_demand_trace(serialize_demand_trace(trace)) == trace

    def test_demand_at_is_piecewise_constant(self):
        trace = parse_demand_trace("10,2\n20,5")
        assert trace.demand_at(0) == 0
        assert trace.demand_at(10) == 2
        assert trace.demand_at(19) == 2
        assert trace.demand_at(20) == 5
        assert trace.demand_at(10**9) == 5


def jobs_at(times, size=1, runtime=10):
    jobs = tuple(Job(i + 1, t, runtime, size) for i, t in enumerate(times))
    return JobTrace(jobs=jobs, peak_demand=size, window=(0, max(times) if times else 0))


class TestWindow:
    def test_cut_and_rebase(self):
        trace = jobs_at([10, 20, 30])
        cut = window(trace, 15, 10)
        assert [j.submit_time for j in cut.jobs] == [5]
        assert cut.jobs[0].id == 2
        assert cut.window == (15, 10)

    def test_full_span_identity_modulo_rebase(self):
        trace = jobs_at([0, 10, 20])
        cut = window(trace, 0, 21)
        assert cut.jobs == trace.jobs

    def test_half_open_interval(self):
        trace = jobs_at([10, 20])
        cut = window(trace, 0, 20)
        assert [j.id for j in cut.jobs] == [1]

    def test_empty_window_errors(self):
        with pytest.raises(EmptyTraceError):
            window(jobs_at([10]), 100, 50)

    def test_nonpositive_duration_rejected(self):
        with pytest.raises(ValueError):
            window(jobs_at([10]), 0, 0)

    @given(
        st.lists(st.integers(min_value=0, max_value=1000), min_size=1, max_size=20),
        st.integers(min_value=0, max_value=500),
        st.integers(min_value=1, max_value=1000),
    )
    def test_idempotent(self, times, start, duration):
        trace = jobs_at(sorted(times))
        try:
            once = window(trace, start, duration)
        except EmptyTraceError:
            return
        assert window(once, 0, duration) == once


class TestNormalizeCpus:
    def test_exact_division(self):
        trace = jobs_at([0], size=8)
        assert normalize_cpus(trace, 8).jobs[0].size == 1

    def test_ceiling(self):
        trace = jobs_at([0], size=9)
        assert normalize_cpus(trace, 8).jobs[0].size == 2

    def test_peak_recomputed(self):
        jobs = (Job(1, 0, 10, 9), Job(2, 1, 10, 16))
        trace = JobTrace(jobs=jobs, peak_demand=16, window=(0, 1))
        assert normalize_cpus(trace, 8).peak_demand == 2

    @given(
        st.lists(st.integers(min_value=1, max_value=4096), min_size=1, max_size=30),
        st.integers(min_value=1, max_value=64),
    )
    def test_never_produces_zero_size(self, sizes, divisor):
        jobs = tuple(Job(i + 1, i, 10, s) for i, s in enumerate(sizes))
        trace = JobTrace(jobs=jobs, peak_demand=max(sizes), window=(0, len(sizes)))
        assert all(j.size >= 1 for j in normalize_cpus(trace, divisor).jobs)


class TestScaleToPeak:
    def test_factor_two(self):
        jobs = (Job(1, 0, 10, 2), Job(2, 1, 10, 4))
        trace = JobTrace(jobs=jobs, peak_demand=4, window=(0, 1))
        scaled = scale_to_peak(trace, 8)
        assert [j.size for j in scaled.jobs] == [4, 8]
        assert scaled.peak_demand == 8

    def test_identity_when_target_equals_peak(self):
        jobs = (Job(1, 0, 10, 3), Job(2, 1, 10, 7))
        trace = JobTrace(jobs=jobs, peak_demand=7, window=(0, 1))
        assert scale_to_peak(trace, 7).jobs == trace.jobs

    def test_job_sizes_floored_at_one(self):
        jobs = (Job(1, 0, 10, 1), Job(2, 1, 10, 100))
        trace = JobTrace(jobs=jobs, peak_demand=100, window=(0, 1))
        assert scale_to_peak(trace, 10).jobs[0].size == 1

    def test_zero_peak_rejected(self):
        demand = DemandTrace(samples=((0, 0),), peak_demand=0)
        with pytest.raises(ValueError):
            scale_to_peak(demand, 5)

    def test_demand_doubling_matches_independent_recompute(self, synthetic_ws_raw):
        # Oracle: doubling a peak-64 trace to 128 must equal 2x every sample,
        # and the max over the scaled list must equal the target exactly.
        scaled = scale_to_peak(synthetic_ws_raw, 128)
        expected = tuple((t, 2 * d) for t, d in synthetic_ws_raw.samples)
        assert scaled.samples == expected
        assert max(d for _, d in scaled.samples) == 128

    @given(
        st.lists(st.integers(min_value=0, max_value=10000), min_size=1, max_size=50),
        st.integers(min_value=1, max_value=500),
    )
    @settings(max_examples=200)
    def test_scaled_demand_peak_is_exact(self, demands, target):
        if max(demands) == 0:
            return
        samples = tuple((i, d) for i, d in enumerate(demands))
        trace = DemandTrace(samples=samples, peak_demand=max(demands))
        scaled = scale_to_peak(trace, target)
        assert max(d for _, d in scaled.samples) == target
        assert scaled.peak_demand == target

    @given(
        st.lists(st.integers(min_value=1, max_value=10000), min_size=1, max_size=50),
        st.integers(min_value=1, max_value=500),
    )
    @settings(max_examples=200)
    def test_scaled_job_peak_is_exact_and_positive(self, sizes, target):
        jobs = tuple(Job(i + 1, i, 10, s) for i, s in enumerate(sizes))
        trace = JobTrace(jobs=jobs, peak_demand=max(sizes), window=(0, len(sizes)))
        scaled = scale_to_peak(trace, target)
        assert max(j.size for j in scaled.jobs) == target
        assert all(1 <= j.size <= target for j in scaled.jobs)
