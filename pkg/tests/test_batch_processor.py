import unittest

from relconv.runner.batch_processor import JobInfo, ThreadBatchProcessor


def simple_add(a, b):
    """Simple function for testing."""
    return a + b


def simple_square(x):
    """Simple function for testing."""
    return x * x


def failing_function():
    """Function that raises an exception."""
    raise ValueError("Test error")


class TestJobInfo(unittest.TestCase):
    def test_job_info_init(self):
        job = JobInfo(job_id=1, func=simple_add, tag="test_tag")
        self.assertEqual(job.job_id, 1)
        self.assertEqual(job.func, simple_add)
        self.assertEqual(job.tag, "test_tag")
        self.assertIsNone(job.ret_val)
        self.assertIsNone(job.result)
        self.assertEqual(job.stderr, "")


class TestThreadBatchProcessor(unittest.TestCase):
    def test_init(self):
        self.assertEqual(ThreadBatchProcessor(max_threads=4).max_threads, 4)
        self.assertEqual(ThreadBatchProcessor(max_threads=0).max_threads, 1)
        self.assertGreater(ThreadBatchProcessor().max_threads, 0)

    def test_empty_wait(self):
        self.assertEqual(ThreadBatchProcessor(max_threads=2).wait(), [])

    def test_queue_and_wait(self):
        bp = ThreadBatchProcessor(max_threads=2)
        seen = []
        bp.queue("job1", simple_square, 5)
        bp.queue("job2", simple_square, x=10)
        jobs = bp.wait(callback=seen.append)

        self.assertEqual(len(seen), 2)
        self.assertEqual([j.tag for j in jobs], ["job1", "job2"])
        self.assertEqual([j.result for j in jobs], [25, 100])
        self.assertTrue(all(j.ret_val == 0 for j in jobs))

    def test_results_keep_queue_order(self):
        bp = ThreadBatchProcessor(max_threads=4)
        for i in range(20):
            bp.queue(i, simple_add, i, 1)
        jobs = bp.wait()
        self.assertEqual([j.result for j in jobs], list(range(1, 21)))
        self.assertEqual([j.job_id for j in jobs], list(range(20)))

    def test_failing_job(self):
        bp = ThreadBatchProcessor(max_threads=2)
        bp.queue("bad", failing_function)
        bp.queue("good", simple_add, 1, 2)
        jobs = bp.wait()
        self.assertEqual(jobs[0].ret_val, 1)
        self.assertIn("Test error", jobs[0].stderr)
        self.assertEqual(jobs[1].result, 3)

    def test_queue_without_function(self):
        with self.assertRaises(ValueError):
            ThreadBatchProcessor().queue("tag")

    def test_processor_is_reusable(self):
        bp = ThreadBatchProcessor(max_threads=2)
        bp.queue("a", simple_square, 2)
        bp.wait()
        bp.queue("b", simple_square, 3)
        jobs = bp.wait()
        self.assertEqual(len(jobs), 1)
        self.assertEqual(jobs[0].result, 9)
