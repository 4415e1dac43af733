'''Unittests for timing marks and summary statistics.'''

import unittest

import test
from vertexspectra import profile


class TestProfile(unittest.TestCase):
    '''Test case for the profile marks.'''

    def test_marks(self):
        timer = profile.Profile(test.core(), 'point')
        timer.mark('count', 2)
        timer.mark('count', 3)
        timer.mark_all('stage')
        self.assertEqual(5.0, timer.marks['count'])
        self.assertIn('stage:cpu', timer.marks)
        self.assertIn('stage:time', timer.marks)
        self.assertTrue(repr(timer).startswith('point count=5.000 '))

    def test_summarize(self):
        summary = profile.summarize([1.0, 2.0, 3.0, 6.0])
        self.assertEqual(4, summary['count'])
        self.assertEqual(12.0, summary['total'])
        self.assertEqual(3.0, summary['average'])
        self.assertEqual(1.0, summary['min'])
        self.assertEqual(6.0, summary['max'])
        self.assertAlmostEqual(3.5 ** 0.5, summary['stddev'])
        self.assertIsNone(profile.summarize([])['average'])


if __name__ == '__main__':
    unittest.main()
